// Central selection state: one hovered ref, pinned refs, the active test pair,
// and expanded topics. Views subscribe and re-render; the latest change wins.

import type { HoverRef, SelectionState } from "./types";

type Listener = (state: SelectionState) => void;

export class SelectionStore {
  private state: SelectionState = {
    hoveredRef: null,
    pinnedRefs: [],
    activePairId: null,
    expandedTopicIds: new Set(),
  };
  private listeners: Listener[] = [];

  get current(): SelectionState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  setHovered(ref: HoverRef | null): void {
    this.state = { ...this.state, hoveredRef: ref };
    this.emit();
  }

  pin(ref: HoverRef): void {
    const exists = this.state.pinnedRefs.some(
      (p) => p.kind === ref.kind && p.id === ref.id,
    );
    if (exists) return;
    this.state = { ...this.state, pinnedRefs: [...this.state.pinnedRefs, ref] };
    this.emit();
  }

  unpin(ref: HoverRef): void {
    this.state = {
      ...this.state,
      pinnedRefs: this.state.pinnedRefs.filter(
        (p) => !(p.kind === ref.kind && p.id === ref.id),
      ),
    };
    this.emit();
  }

  setActivePair(pairId: string | null): void {
    this.state = { ...this.state, activePairId: pairId };
    this.emit();
  }

  toggleTopic(topicId: string): void {
    const expanded = new Set(this.state.expandedTopicIds);
    if (expanded.has(topicId)) expanded.delete(topicId);
    else expanded.add(topicId);
    this.state = { ...this.state, expandedTopicIds: expanded };
    this.emit();
  }
}
