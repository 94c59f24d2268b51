#!/usr/bin/env python3
"""Builds the fixture corpus, mock script, test pair, and expected-value manifest.

Everything here is design data plus straight-line set logic, independent of the
package under test: documents are authored as sixteen-token sentences so chunk
boundaries land on sentence edges (chunk_size=64, overlap=16 -> one chunk per
three sentences), extraction payloads are attached to sentences, and the
manifest's expected values are derived from those tables, never from running
the pipeline. Assertions at the bottom enforce every fixture invariant the
acceptance suite relies on.
"""

from __future__ import annotations

import json
import sys
from collections import Counter, defaultdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from _oracles import (  # noqa: E402
    oracle_normalize_name,
    oracle_normalize_text,
    oracle_split,
    oracle_token_spans,
)

HERE = Path(__file__).resolve().parent

CHUNK_SIZE = 64
OVERLAP = 16
SENTENCE_TOKENS = 16

QUESTION = (
    "Which entity previously focused on illegal content and misinformation related "
    "to the Israel-Hamas conflict and is enforcing more than two major digital acts?"
)
GROUND_TRUTH = "European Commission"
FACT1 = (
    "The European Commission previously focused on illegal content and misinformation "
    "related to the ongoing Israel-Hamas conflict."
)
FACT2 = (
    "The European Commission is enforcing the Digital Services Act and the Digital "
    "Markets Act on Meta."
)

# payload shorthand: e = entity records (name, type, description),
#                    r = relationship records (source, target, description, strength)

DOCS = [
    {
        "title": "Israel-Hamas conflict tests platform moderation",
        "published_at": "2023-11-02",
        "sentences": [
            ("Fighting between Israel and Hamas intensified again this week as mediators pressed both sides for restraint.", None),
            ("Correspondents described exhausted families leaving shattered neighborhoods while artillery echoed across the coastal strip at dawn.",
             {"e": [("Israel", "geo", "Country engaged in the Gaza war."),
                    ("Hamas", "organization", "Militant group governing Gaza.")],
              "r": [("Israel", "Hamas", "Armed conflict between the two sides.", 0.9)]}),
            ("Military analysts said the ground operation would widen unless ceasefire talks produced a verifiable agreement soon.",
             {"e": [("IDF", "organization", "Israeli military force."), ("Israel", "", "")],
              "r": [("Israel", "IDF", "National armed forces of the state.", 0.8)]}),
            ("Hospitals in Gaza reported dwindling fuel reserves and overwhelmed wards despite repeated appeals for aid corridors.", None),
            ("Aid convoys waited near the Rafah crossing while inspectors argued over customs manifests and security guarantees.",
             {"e": [("Gaza", "geo", "Coastal territory at the center of the war."),
                    ("Rafah", "geo", "Border city in southern Gaza."), ("Hamas", "", "")],
              "r": [("Hamas", "Gaza", "Governs the territory.", 0.8),
                    ("Gaza", "Rafah", "Neighboring areas under bombardment.", 0.6)]}),
            ("Prime Minister Netanyahu told his war cabinet that operations would continue until every objective was met.",
             {"e": [("Netanyahu", "person", "Israeli prime minister."), ("Israel", "", "")],
              "r": [("Israel", "Netanyahu", "Leads the country's government.", 0.8)]}),
            ("Diplomats in several capitals weighed new language for a resolution they hoped could bridge the impasse.", None),
            ("Air raid sirens sounded again over Tel Aviv as interceptors streaked upward through the evening haze.",
             {"e": [("Tel Aviv", "geo", "Israeli coastal metropolis."), ("Israel", "", "")],
              "r": [("Israel", "Tel Aviv", "Major city of the country.", 0.7)]}),
            ("Hamas spokesmen rejected the latest framework and demanded a complete withdrawal before any further hostages moved.",
             {"e": [("Israel", "", ""), ("Hamas", "", "")],
              "r": [("Israel", "Hamas", "Armed conflict between the two sides.", 0.9)]}),
            ("Regional observers warned that miscalculation on either front could drag neighboring militias directly into the fighting.", None),
            ("Officials at the European Commission tracked viral falsehoods about the war spreading rapidly across major platforms.",
             {"e": [("European Commission", "", "Executive arm of the European Union.")], "r": []}),
            ("The IDF released footage of strikes it said targeted command nodes buried beneath densely built districts.",
             {"e": [("IDF", "", ""), ("Netanyahu", "", "")],
              "r": [("IDF", "Netanyahu", "Military answers to the premier.", 0.7)]}),
            ("Families of captives marched slowly through central streets demanding their government prioritize an immediate exchange deal.", None),
            ("Satellite imagery showed new staging areas forming north of the border fence before routine dawn patrols.",
             {"e": [("Israel", "", ""), ("IDF", "", "")], "r": [("Israel", "IDF", "", 0.8)]}),
            ("Gaza municipal workers struggled to clear heavy rubble from arterial roads under intermittent shellfire and blackouts.",
             {"e": [("Gaza", "", ""), ("Hamas", "", "")], "r": [("Hamas", "Gaza", "", 0.8)]}),
            ("Negotiators shuttled between hotel suites carrying draft annexes that neither delegation would initial without further guarantees.", None),
            ("Rafah shelters absorbed another wave of displaced residents as tents spread further toward the boundary wall.",
             {"e": [("Rafah", "", ""), ("Hamas", "", "")],
              "r": [("Hamas", "Rafah", "Fallback positions in the south.", 0.7)]}),
            ("Commanders acknowledged that urban tunnels complicated every advance and forced much slower, costlier clearing operations daily.",
             {"e": [("Gaza", "", ""), ("Rafah", "", "")], "r": [("Gaza", "Rafah", "", 0.6)]}),
            ("Foreign ministries advised their nationals to defer travel across the region until key commercial routes stabilized.", None),
            ("Evening bulletins closed with casualty tallies that both sides disputed loudly within minutes of publication tonight.",
             {"e": [("Israel", "", ""), ("Netanyahu", "", "")], "r": [("Israel", "Netanyahu", "", 0.8)]}),
        ],
    },
    {
        "title": "Regional fallout draws European scrutiny of platforms",
        "published_at": "2023-11-09",
        "sentences": [
            ("A week of funerals left border towns subdued as reservists rotated slowly back toward forward positions.", None),
            ("Mayors of Tel Aviv suburbs opened shelters for southern evacuees and promised temporary classrooms within days.",
             {"e": [("Tel Aviv", "", ""), ("Israel", "", "")], "r": [("Israel", "Tel Aviv", "", 0.7)]}),
            ("Ministers debated budget transfers for municipalities absorbing uprooted families displaced from communities near the southern fence.",
             {"e": [("Netanyahu", "", ""), ("Tel Aviv", "", "")],
              "r": [("Netanyahu", "Tel Aviv", "Political base includes the metro area.", 0.5)]}),
            ("Commentators questioned whether any security doctrine could restore public confidence along the scarred frontier communities soon.", None),
            (FACT1,
             {"e": [("Israel", "", ""), ("Hamas", "", ""), ("European Commission", "", "")], "r": []}),
            ("Its officials had pressed major platforms for takedown timelines and clearer labels on state media accounts.", None),
            ("Lawmakers across Europe cited the episode while drafting written questions for upcoming hearings on content moderation.", None),
            ("Hamas media channels amplified several unverified clips that fact checkers later traced to unrelated conflicts abroad.",
             {"e": [("Hamas", "", ""), ("Israel", "", "")],
              "r": [("Israel", "Hamas", "War in Gaza between the two sides.", 0.9)]}),
            ("An IDF briefing disputed viewing figures circulating widely online and published its own engagement numbers instead.",
             {"e": [("IDF", "", ""), ("Tel Aviv", "", "")],
              "r": [("IDF", "Tel Aviv", "Headquarters sit in the metro area.", 0.6)]}),
            ("Editors struggled to verify battlefield claims faster than screenshots spread virally through encrypted channels each evening.", None),
            ("European commission staff compiled detailed weekly digests of flagged posts for the incoming enforcement task force.",
             {"e": [("European commission", "", "")], "r": []}),
            ("Netanyahu allies argued that the information war mattered as much as any manoeuvre on the ground.",
             {"e": [("Netanyahu", "", ""), ("IDF", "", "")], "r": [("IDF", "Netanyahu", "", 0.7)]}),
            ("Polling suggested exhausted publics on every side doubted all official narratives more with each passing week.", None),
            ("Volunteers mapped building damage across Gaza neighborhoods using crowdsourced photographs and open satellite imagery tiles nightly.",
             {"e": [("Gaza", "", ""), ("Rafah", "", ""), ("Hamas", "", "")],
              "r": [("Hamas", "Rafah", "", 0.7)]}),
            ("Aid coordinators noted that crossings functioned best on the days when inspections started before first light.",
             {"e": [("Tel Aviv", "", ""), ("Netanyahu", "", "")],
              "r": [("Netanyahu", "Tel Aviv", "", 0.5)]}),
            ("Universities postponed exchange programs while airlines trimmed flight schedules and rerouted crews through alternate eastern hubs.", None),
            ("Military correspondents embedded with armored columns described long uneasy pauses while engineers probed suspected tunnel shafts.",
             {"e": [("IDF", "", ""), ("Tel Aviv", "", "")], "r": [("IDF", "Tel Aviv", "", 0.6)]}),
            ("Think tanks sketched postwar scenarios ranging from international trusteeship to phased local administration under neutral monitors.", None),
            ("Veteran mediators cautioned that windows for de-escalation tend to narrow very quickly once harsh winter arrives.", None),
            ("Weekend supplements profiled families rebuilding daily routines around sirens, shortages, and the grinding arithmetic of war.", None),
        ],
    },
    {
        "title": "Brussels enforces digital rulebooks on Meta",
        "published_at": "2023-11-16",
        "sentences": [
            ("Regulators in Brussels spent the long autumn sharpening tools written into the bloc's landmark digital rulebooks.", None),
            ("Meta faces sweeping obligations under the Digital Services Act covering risk audits and researcher data access.",
             {"e": [("Meta", "organization", "Large social media company."),
                    ("DSA", "law", "EU online content rulebook for large platforms.")],
              "r": [("Meta", "DSA", "Compliance obligations for the platform.", 0.9)]}),
            ("Compliance teams mapped each new article to product surfaces, from recommender settings to advertising transparency libraries.",
             {"e": [("DMA", "law", "EU gatekeeper competition rules."), ("Meta", "", "")],
              "r": [("Meta", "DMA", "Gatekeeper duties for the platform.", 0.8)]}),
            ("Industry lawyers predicted several years of guidance requests, pilot audits, and carefully staged test cases ahead.", None),
            (FACT2,
             {"e": [("EUROPEAN COMMISSION", "", ""), ("Meta", "", ""), ("DSA", "", ""), ("DMA", "", "")],
              "r": [("Meta", "DSA", "", 0.9), ("Meta", "DMA", "", 0.8)]}),
            ("Enforcement staff teams testing the gatekeeper designations requested interoperability documentation for core messaging services last month.", None),
            ("Brussels reporters noted how technical annexes once dismissed as plumbing now regularly headlined prime time bulletins.", None),
            ("A commission spokesperson said formal proceedings remained entirely possible if early voluntary commitments failed audit checks.",
             {"e": [("European Commission", "", "EU regulator overseeing digital policy enforcement."),
                    ("DSA", "", ""), ("DMA", "", "")],
              "r": [("DSA", "DMA", "Twin pillars of the digital rulebook.", 0.6)]}),
            ("Meta executives countered that early audits showed clear measurable progress on risk mitigation and transparency milestones.",
             {"e": [("Meta", "", ""), ("DSA", "", ""), ("DMA", "", "")],
              "r": [("DSA", "DMA", "", 0.6)]}),
            ("Analysts tallied the potential fines and concluded deterrence hinged more on tempo than on headline maximums.", None),
            ("European Commission lawyers catalogued formal platform responses to information requests issued during the long autumn sweep.",
             {"e": [("European Commission", "", "")], "r": []}),
            ("Civil society groups filed structured submissions describing dark patterns they wanted the inspectors to prioritize first.", None),
            ("Editorial boards weighed whether rapid-fire enforcement would seriously chill innovation or finally level the playing field.", None),
            ("Compliance dashboards tracked many dozens of remediation workstreams, each owned by a named senior product executive.", None),
            ("Researchers praised the new data portals while cataloguing gaps between published schemas and daily investigative needs.", None),
            ("Parliamentary committees requested detailed quarterly enforcement scorecards broken down by platform, provision, and final resolution speed.", None),
            ("Trade associations organized closed-door briefings where outside counsel carefully rehearsed responses to three hypothetical inspection scenarios.", None),
            ("Weekend op-eds framed the busy season as a stress test for the union's regulatory ambitions abroad.", None),
            ("Startups watched all the proceedings closely, hoping clarified rules would lower entry costs across the market.", None),
            ("Year-end reviews ranked the sprawling digital files among the stories most likely to shape next spring.", None),
        ],
    },
    {
        "title": "Online safety regulators circle the platforms",
        "published_at": "2023-11-23",
        "sentences": [
            ("London's communications watchdog published its long first tranche of codes under the new online safety regime.", None),
            ("Ofcom signalled that video platforms would face the very earliest deadlines for risk assessments next year.",
             {"e": [("Ofcom", "organization", "UK communications regulator."),
                    ("TikTok", "organization", "Short video platform.")],
              "r": [("TikTok", "Ofcom", "Regulatory oversight of the app.", 0.5)]}),
            ("X Platform told staff it would contest several findings while quietly expanding its small trust team.",
             {"e": [("X Platform", "organization", "Microblogging service."), ("Ofcom", "", "")],
              "r": [("X Platform", "Ofcom", "Under the watchdog's review.", 0.6)]}),
            ("Investors parsed the new filings for hints about advertising recovery across the major social media properties.", None),
            ("Creators migrated campaigns between TikTok and X Platform chasing viral engagement that national regulators now scrutinize.",
             {"e": [("TikTok", "", ""), ("X Platform", "", "")],
              "r": [("X Platform", "TikTok", "Competing feeds for short content.", 0.7)]}),
            ("Moderation researchers compared notice-and-action latencies across rival services using mystery shopper complaints filed late last quarter.",
             {"e": [("X Platform", "", ""), ("TikTok", "", "")],
              "r": [("X Platform", "TikTok", "", 0.7)]}),
            ("Advertising buyers demanded independent brand safety metrics before restoring large budgets paused during several earlier controversies.", None),
            ("Brussels officials noted that the Digital Services Act applies to X Platform's European operations as well.",
             {"e": [("DSA", "", ""), ("X Platform", "", "")],
              "r": [("DSA", "X Platform", "The act covers the service's EU operations.", 0.5)]}),
            ("Ofcom and TikTok exchanged formal letters over age assurance trials scheduled for the coming spring term.",
             {"e": [("Ofcom", "", ""), ("TikTok", "", "")], "r": [("TikTok", "Ofcom", "", 0.5)]}),
            ("Policy newsletters tracked closely how divergent national rules complicated product launches planned for multiple jurisdictions simultaneously.", None),
            ("A European Commission liaison attended the latest London briefings to compare enforcement calendars and evidence standards.",
             {"e": [("European Commission", "", "")], "r": []}),
            ("X Platform's compliance chief described a unified dashboard spanning British and European obligations for internal reviewers.",
             {"e": [("X Platform", "", ""), ("Ofcom", "", ""), ("DSA", "", "")],
              "r": [("X Platform", "Ofcom", "", 0.6), ("DSA", "X Platform", "", 0.5)]}),
            ("Industry conferences replayed the year's enforcement milestones while consultants pitched costly readiness assessments to anxious platforms.", None),
            ("Taylor Swift's stadium tour coverage dominated entertainment feeds even as policy stories crowded the news sections.",
             {"e": [("Taylor Swift", "person", "Pop superstar on a record tour."),
                    ("Travis Kelce", "person", "Star tight end.")],
              "r": [("Taylor Swift", "Travis Kelce", "Celebrity couple drawing crowds.", 0.9)]}),
            ("Travis Kelce's appearances with the Kansas City Chiefs doubled neatly as marketing beats for broadcasters everywhere.",
             {"e": [("Travis Kelce", "", ""), ("Kansas City Chiefs", "organization", "NFL franchise.")],
              "r": [("Travis Kelce", "Kansas City Chiefs", "Plays for the franchise.", 0.7)]}),
            ("Culture desks debated whether celebrity economies now truly moved markets more reliably than quarterly earnings calls.", None),
            ("Arrowhead Stadium crowds set loud noise records whenever Swift appeared on the giant jumbotron between drives.",
             {"e": [("Arrowhead Stadium", "location", "Kansas City stadium."),
                    ("Taylor Swift", "", ""), ("Kansas City Chiefs", "", "")],
              "r": [("Taylor Swift", "Arrowhead Stadium", "Frequent appearances at the venue.", 0.6),
                    ("Kansas City Chiefs", "Arrowhead Stadium", "Home field of the team.", 0.8)]}),
            ("The Chiefs' home schedule sold out within minutes, with resale prices tripling instantly for marquee matchups.",
             {"e": [("Kansas City Chiefs", "", ""), ("Travis Kelce", "", ""), ("Arrowhead Stadium", "", "")],
              "r": [("Travis Kelce", "Kansas City Chiefs", "", 0.7),
                    ("Kansas City Chiefs", "Arrowhead Stadium", "", 0.8)]}),
            ("Sports economists charted the measurable bump in seasonal local hospitality revenue attributable to the touring entourage.", None),
            ("Swift and Kelce sightings at practice facilities generated huge engagement spikes that platform dashboards flagged automatically.",
             {"e": [("Taylor Swift", "", ""), ("Travis Kelce", "", ""), ("Kansas City Chiefs", "", "")],
              "r": [("Taylor Swift", "Travis Kelce", "", 0.9),
                    ("Taylor Swift", "Kansas City Chiefs", "Travels with the team's circle.", 0.8)]}),
        ],
    },
    {
        "title": "Brussels leadership season",
        "published_at": "2023-11-30",
        "sentences": [
            ("Personnel chatter consumed the Berlaymont as commissioners prepared detailed portfolios for the busy incoming mandate season.", None),
            ("Ursula von der Leyen sketched second-term priorities that balanced industrial strategy against enlargement and defense budgets.",
             {"e": [("Ursula von der Leyen", "person", "President of the EU executive."),
                    ("European Commission", "", "Executive arm of the European Union.")],
              "r": [("European Commission", "Ursula von der Leyen", "Leads the institution.", 0.7)]}),
            ("Thierry Breton kept a relentless public schedule, touring chip factories and gigafactories between major regulatory announcements.",
             {"e": [("Thierry Breton", "person", "Commissioner for the internal market."),
                    ("Ursula von der Leyen", "", "")],
              "r": [("Thierry Breton", "Ursula von der Leyen", "College colleagues.", 0.6)]}),
            ("Correspondents mapped which cabinets gained influence as digital files migrated quietly between directorates over the summer.", None),
            ("European Commission veterans recalled how previous mandates buckled when flagship files lacked firm sustained political cover.",
             {"e": [("European Commission", "", ""), ("Thierry Breton", "", "")],
              "r": [("European Commission", "Thierry Breton", "Senior member of the institution.", 0.8)]}),
            ("Staffers joked that organigram archaeology had once again become the city's true winter sport this cycle.", None),
            ("Think tank panels debated whether institutional memory survives big reshuffles better than any strategy document does.", None),
            ("Von der Leyen and Breton presented a detailed joint communiqué on supply chain resilience from Strasbourg.",
             {"e": [("Ursula von der Leyen", "", ""), ("Thierry Breton", "", ""), ("European Commission", "", "")],
              "r": [("Thierry Breton", "Ursula von der Leyen", "", 0.6),
                    ("European Commission", "Thierry Breton", "", 0.8)]}),
            ("Parliament liaisons catalogued which veteran rapporteurs would shepherd leftover digital dossiers through the busy next term.",
             {"e": [], "r": [("European Commission", "Ursula von der Leyen", "", 0.7)]}),
            ("Columnists warned against mistaking communiqué cadence for delivery, citing several files stalled deep in committee purgatory.", None),
            ("EUROPEAN COMMISSION press officers fielded rapid queries in four languages before the midday briefing even began.",
             {"e": [("EUROPEAN COMMISSION", "", ""), ("Ursula von der Leyen", "", "")], "r": []}),
            ("Budget hawks in several capitals signalled resistance to new common borrowing for joint industrial policy plans.", None),
            ("Veteran observers noted the quiet professionalism with which handover binders moved smoothly between private offices overnight.", None),
            ("Kelce highlights played silently on airport screens while Arrowhead Stadium renovations trended briefly in sports feeds.",
             {"e": [("Travis Kelce", "", ""), ("Arrowhead Stadium", "", "")],
              "r": [("Travis Kelce", "Arrowhead Stadium", "Signature venue performances.", 0.7)]}),
            ("A travelling exhibit celebrated big stadium concerts, pairing Swift memorabilia with Chiefs championship artifacts under glass.",
             {"e": [("Taylor Swift", "", ""), ("Kansas City Chiefs", "", ""), ("Arrowhead Stadium", "", "")],
              "r": [("Taylor Swift", "Kansas City Chiefs", "", 0.8),
                    ("Taylor Swift", "Arrowhead Stadium", "", 0.6)]}),
            ("Event planners studied crowd flow diagrams from several recent tours to de-risk winter fixture congestion entirely.", None),
            ("Kelce's long postseason preparation at Arrowhead drew roving camera crews normally assigned to entertainment desks instead.",
             {"e": [("Travis Kelce", "", ""), ("Arrowhead Stadium", "", "")],
              "r": [("Travis Kelce", "Arrowhead Stadium", "", 0.7)]}),
            ("Hospitality desks packaged matchday weekends with museum passes, hoping visiting cultural tourists linger through Monday morning.", None),
            ("Local radio debated whether celebrity gravity distorts coverage priorities during such a consequential local policy season.", None),
            ("Sunday profiles traced how institutional Brussels and celebrity America briefly shared the very same news cycle.", None),
        ],
    },
    {
        "title": "Courtroom verdicts and crypto exuberance",
        "published_at": "2023-12-07",
        "sentences": [
            ("A federal jury's verdict reverberated through app economics panels convened quite hastily across the whole valley.", None),
            ("Epic celebrated the antitrust finding against Google as vindication for its long noisy campaign over fees.",
             {"e": [("Epic", "organization", "Game developer behind the storefront fight."),
                    ("Google", "organization", "Search and mobile ecosystem giant.")],
              "r": [("Epic", "Google", "Antitrust lawsuit between the companies.", 0.9)]}),
            ("Internal emails shown at trial described generous Play Store margins executives worried would invite regulatory attention.",
             {"e": [("Play Store", "product", "Android app marketplace."), ("Google", "", "")],
              "r": [("Google", "Play Store", "Operates the marketplace.", 0.8)]}),
            ("Appellate specialists cautioned that remedies hearings often quietly narrow sweeping verdicts into carefully bounded final injunctions.", None),
            ("Google said Alphabet would appeal promptly and defended its billing policies as industry standard practice everywhere.",
             {"e": [("Google", "", "")],
              "r": [("Google", "Alphabet", "Subsidiary of the holding company.", 0.7)]}),
            ("Developers recalculated store economics under three scenarios where alternative billing survived the long inevitable appeals process.",
             {"e": [("Epic", "", ""), ("Play Store", "", "")],
              "r": [("Epic", "Play Store", "Distribution dispute over the storefront.", 0.6)]}),
            ("Trade press contrasted the jury outcome with a strikingly different bench ruling in a parallel case.", None),
            ("Epic's litigation team projected public confidence about defending the Google verdict through every coming appellate stage.",
             {"e": [("Epic", "", ""), ("Google", "", ""), ("Play Store", "", "")],
              "r": [("Epic", "Google", "", 0.9), ("Google", "Play Store", "", 0.8)]}),
            ("Storefront rivals pitched game studios on migration toolkits promising lower fees and much faster certification pipelines.",
             {"e": [("Epic", "", ""), ("Play Store", "", "")], "r": [("Epic", "Play Store", "", 0.6)]}),
            ("Antitrust scholars filed the decision alongside other landmark cases reshaping how platforms meter modern digital distribution.", None),
            ("Bitcoin's rally past symbolic thresholds pulled eager retail traders back toward exchange apps and breathless newsletters.",
             {"e": [("Bitcoin", "asset", "Largest cryptocurrency by market value."),
                    ("Coinbase", "organization", "US listed crypto exchange.")],
              "r": [("Bitcoin", "Coinbase", "Primary listed trading venue.", 0.9)]}),
            ("Coinbase volumes doubled during the week Tether minted yet another tranche to meet surging exchange demand.",
             {"e": [("Tether", "asset", "Dollar pegged stablecoin issuer."), ("Coinbase", "", ""), ("Bitcoin", "", "")],
              "r": [("Coinbase", "Tether", "Stablecoin pairs dominate volumes.", 0.7),
                    ("Bitcoin", "Tether", "Benchmark pricing pair.", 0.8)]}),
            ("Macro desks debated whether approval flows or halving math better explained most of the quarter's momentum.", None),
            ("Binance's restructured compliance program drew grudging praise from outside monitors installed after last year's landmark settlement.",
             {"e": [("Binance", "organization", "Global crypto exchange under monitorship."),
                    ("Bitcoin", "", ""), ("Tether", "", "")],
              "r": [("Bitcoin", "Binance", "Deep spot liquidity.", 0.6),
                    ("Tether", "Binance", "Settlement rail on the exchange.", 0.8)]}),
            ("Exchange wallets shifted stablecoin float between major venues as arbitrage desks chased thin basis spreads overnight.",
             {"e": [("Coinbase", "", ""), ("Binance", "", ""), ("Tether", "", "")],
              "r": [("Coinbase", "Binance", "Rival venues sharing flows.", 0.7),
                    ("Coinbase", "Tether", "", 0.7)]}),
            ("Risk officers rehearsed severe depeg scenarios even as attestations showed reserves comfortably above total outstanding supply.", None),
            ("Tether's quarterly attestation charted growing reserves across bills and repos while Bitcoin ETFs absorbed record inflows.",
             {"e": [("Tether", "", ""), ("Bitcoin", "", ""), ("Binance", "", "")],
              "r": [("Bitcoin", "Tether", "", 0.8), ("Tether", "Binance", "", 0.8)]}),
            ("Brokerage notes framed the big exchanges' détente as maturity, with market share stabilizing across major regions.",
             {"e": [("Coinbase", "", ""), ("Binance", "", ""), ("Bitcoin", "", "")],
              "r": [("Coinbase", "Binance", "", 0.7), ("Bitcoin", "Binance", "", 0.6),
                    ("Bitcoin", "Coinbase", "", 0.9)]}),
            ("Podcast roundtables asked whether even this cycle's infrastructure could finally withstand a truly genuine liquidity shock.", None),
            ("Weekend closing wraps juxtaposed courtroom drama and crypto exuberance as twin narratives of concentrated platform power.", None),
        ],
    },
]

# Hand-derived topic tree (verified by exhaustive modularity checks in the tests):
# six level-0 communities; the conflict and regulation clusters split once.
TOPIC_DESIGN = {
    "level0": [
        sorted(["GAZA", "HAMAS", "IDF", "ISRAEL", "NETANYAHU", "RAFAH", "TEL AVIV"]),
        sorted(["DMA", "DSA", "META", "OFCOM", "TIKTOK", "X PLATFORM"]),
        sorted(["EUROPEAN COMMISSION", "THIERRY BRETON", "URSULA VON DER LEYEN"]),
        sorted(["ALPHABET", "EPIC", "GOOGLE", "PLAY STORE"]),
        sorted(["ARROWHEAD STADIUM", "KANSAS CITY CHIEFS", "TAYLOR SWIFT", "TRAVIS KELCE"]),
        sorted(["BINANCE", "BITCOIN", "COINBASE", "TETHER"]),
    ],
    "level1": {
        "ISRAEL": [sorted(["GAZA", "HAMAS", "ISRAEL", "RAFAH"]), sorted(["IDF", "NETANYAHU", "TEL AVIV"])],
        "META": [sorted(["DMA", "DSA", "META"]), sorted(["OFCOM", "TIKTOK", "X PLATFORM"])],
    },
}

REPORT_TEXTS = {
    "A": "The cluster centers on the Israel-Hamas war. Israel's operations involve the IDF under Netanyahu's government, with Tel Aviv under rocket alerts, while Hamas, Gaza, and Rafah anchor the opposing side of the fighting.",
    "A1": "Israel and Hamas remain locked in direct conflict, with Gaza and Rafah bearing the humanitarian weight of the campaign in the south.",
    "A2": "The IDF coordinates with Netanyahu's cabinet while Tel Aviv absorbs alerts and hosts command institutions during the campaign.",
    "B": "Digital rulebooks bind the platform economy: Meta answers to the DSA and DMA while X Platform, TikTok, and Ofcom shape the online safety regime across jurisdictions.",
    "B1": "Meta operates under the Digital Services Act and the Digital Markets Act, with risk audits and gatekeeper duties shaping its product plans across the single market.",
    "B2": "X Platform and TikTok navigate Ofcom's online safety codes, trading engagement while regulators schedule the earliest compliance deadlines.",
    "C": "The European Commission under Ursula von der Leyen, with Thierry Breton driving the internal market portfolio, sets the enforcement agenda from Brussels.",
    "D": "Epic's antitrust win against Google puts Play Store economics under scrutiny, with Alphabet preparing appeals.",
    "E": "Taylor Swift and Travis Kelce headline a celebrity economy orbiting the Kansas City Chiefs and Arrowhead Stadium.",
    "F": "Bitcoin's rally lifts Coinbase and Binance volumes while Tether supplies the settlement rail across exchanges.",
}

# (label, match_substrings) in first-match-wins order; parents precede children.
SUMMARIZE_ORDER = [
    ("A", ["- Israel", "- IDF"]),
    ("A1", ["- Israel"]),
    ("A2", ["- IDF"]),
    ("B", ["- Meta", "- TikTok"]),
    ("B1", ["- Meta"]),
    ("B2", ["- TikTok"]),
    ("C", ["- European Commission"]),
    ("D", ["- Epic"]),
    ("E", ["- Taylor Swift"]),
    ("F", ["- Bitcoin"]),
]

ACTUAL_INFER_RESPONSE = """Step 1: The question concerns moderation around the Israel-Hamas conflict [E1] [E2].
Step 2: A topic report describes Meta complying with the Digital Services Act and the Digital Markets Act.
Step 3: Israel and Hamas are connected through the ongoing conflict [R1].
Step 4: Moderation of illegal content about the conflict is attributed to Meta [E1] [E2].
Step 5: Meta therefore fits both parts of the question [E1] [R1].
Answer: Meta"""

EVALUATE_RESPONSE = """VERDICT: wrong
SCORE: 0.15
JUSTIFICATION: The actual answer names Meta, but the evidence attributes both the moderation focus and the enforcement of the digital acts to the European Commission.
DISCREPANCY: Meta is credited with focusing on illegal content and misinformation about the Israel-Hamas conflict, but that was the European Commission's role. (From Fact 1)
DISCREPANCY: Meta is described as enforcing more than two digital acts, a responsibility that belongs to the European Commission. (From Fact 2)"""

EXPAND_F1_RESPONSE = (
    "Around the Israel-Hamas conflict, the European Commission previously focused on "
    "illegal content and misinformation spreading on major platforms, pressing them "
    "over takedown timelines and labels."
)
EXPAND_F2_RESPONSE = (
    "The European Commission is enforcing the Digital Services Act and the Digital "
    "Markets Act on Meta, imposing audits and gatekeeper duties on the platform."
)

GT_INFER_RESPONSE = """Step 1: Coverage of the Israel-Hamas war drew regulatory attention to illegal content online. [F1]
Step 2: The European Commission previously focused on illegal content and misinformation about that conflict. [F1]
Step 3: The European Commission is enforcing the Digital Services Act and the Digital Markets Act on Meta, per the record. [F2]
Answer: European Commission"""

GT_STEP_KEEPS = {
    # step ordinal -> (cited fact ordinal, kept entity names, kept relationship pairs)
    1: (1, ["HAMAS", "ISRAEL"], []),
    2: (1, ["EUROPEAN COMMISSION", "HAMAS"], []),
    3: (2, [], [("DMA", "META")]),
}
FILTER_MATCHERS = {
    1: ["drew regulatory attention"],
    2: ["misinformation about that conflict"],
    3: ["enforcing the Digital Services Act"],
}


def build() -> None:
    # ---- lay out documents, chunks, and per-chunk extraction payloads -------
    doc_rows = []
    chunk_payloads: dict[str, dict] = {}  # chunk_id -> {"entities": [...], "relationships": [...]}
    chunk_texts: dict[str, str] = {}
    fact_chunks = {1: [], 2: []}
    problems: list[str] = []

    for doc_idx, doc in enumerate(DOCS):
        doc_id = f"doc-{doc_idx:04d}"
        sentences = [s for s, _ in doc["sentences"]]
        for s_idx, sentence in enumerate(sentences):
            n = len(sentence.split())
            if n != SENTENCE_TOKENS:
                problems.append(f"{doc_id} sentence {s_idx} has {n} tokens: {sentence[:60]!r}")
        text = " ".join(sentences)
        doc_rows.append(
            {
                "id": f"mh-{doc_idx:03d}",
                "title": doc["title"],
                "body": text,
                "source": "fixture",
                "published_at": doc["published_at"],
            }
        )
        chunks = oracle_split(text, CHUNK_SIZE, OVERLAP)
        spans = oracle_token_spans(text)
        for c_idx, (start, end, chunk_text) in enumerate(chunks):
            chunk_id = f"{doc_id}#{c_idx:03d}"
            chunk_texts[chunk_id] = chunk_text
            chunk_payloads.setdefault(chunk_id, {"entities": [], "relationships": []})

        # Map each payload sentence to the first chunk containing it entirely.
        for s_idx, (sentence, payload) in enumerate(doc["sentences"]):
            tok_start = s_idx * SENTENCE_TOKENS
            tok_end = tok_start + SENTENCE_TOKENS - 1
            char_start = spans[tok_start][0]
            char_end = spans[tok_end][1]
            containing = [
                f"{doc_id}#{c_idx:03d}"
                for c_idx, (cs, ce, _) in enumerate(chunks)
                if cs <= char_start and char_end <= ce
            ]
            if payload is not None:
                if len(containing) != 1:
                    problems.append(
                        f"{doc_id} payload sentence {s_idx} lands in {len(containing)} chunks"
                    )
                    continue
                target = chunk_payloads[containing[0]]
                for name, etype, desc in payload.get("e", []):
                    target["entities"].append((name, etype, desc))
                for src, tgt, desc, strength in payload.get("r", []):
                    target["relationships"].append((src, tgt, desc, strength))
            if sentence == FACT1:
                fact_chunks[1] = containing
            if sentence == FACT2:
                fact_chunks[2] = containing

    if problems:
        for p in problems:
            print("FIXTURE PROBLEM:", p)
        raise SystemExit(1)

    # ---- extraction script entries, one per chunk, anchored on a unique sentence
    script_entries = []
    all_chunk_ids = sorted(chunk_texts)
    for chunk_id in all_chunk_ids:
        doc_idx = int(chunk_id[4:8])
        c_idx = int(chunk_id.split("#")[1])
        sentences = [s for s, _ in DOCS[doc_idx]["sentences"]]
        anchor_idx = min(3 * c_idx + 1, len(sentences) - 1)
        anchor = sentences[anchor_idx]
        holders = [cid for cid, text in chunk_texts.items() if anchor in text]
        if holders != [chunk_id]:
            raise SystemExit(f"anchor for {chunk_id} not unique: {holders}")
        payload = chunk_payloads[chunk_id]
        seen: set[str] = set()
        lines = []
        for name, etype, desc in payload["entities"]:
            key = oracle_normalize_name(name)
            if key in seen:
                continue
            seen.add(key)
            lines.append(f'("entity"|{name}|{etype}|{desc})')
        for src, tgt, desc, strength in payload["relationships"]:
            lines.append(f'("relationship"|{src}|{tgt}|{desc}|{strength})')
        script_entries.append(
            {"stage": "extract", "match_substrings": [anchor], "response": "\n".join(lines)}
        )

    # ---- derived graph model (independent re-derivation of the merge rules) ---
    raw_entities_by_name: dict[str, list[tuple[str, str, str]]] = defaultdict(list)
    entity_chunks: dict[str, set[str]] = defaultdict(set)
    entity_name_spellings: dict[str, list[str]] = defaultdict(list)
    rel_raws: dict[tuple[str, str], list[tuple[str, str, float]]] = defaultdict(list)
    raw_entity_count = 0
    raw_rel_count = 0
    for chunk_id in all_chunk_ids:
        payload = chunk_payloads[chunk_id]
        seen: set[str] = set()
        for name, etype, desc in payload["entities"]:
            key = oracle_normalize_name(name)
            if key in seen:
                continue
            seen.add(key)
            raw_entity_count += 1
            raw_entities_by_name[key].append((chunk_id, etype, desc))
            entity_chunks[key].add(chunk_id)
            entity_name_spellings[key].append(name)
        for src, tgt, desc, strength in payload["relationships"]:
            raw_rel_count += 1
            for endpoint in (src, tgt):
                key = oracle_normalize_name(endpoint)
                if key not in seen:  # placeholder raw entity synthesized by the pipeline
                    seen.add(key)
                    raw_entity_count += 1
                    raw_entities_by_name[key].append((chunk_id, "", ""))
                    entity_chunks[key].add(chunk_id)
                    entity_name_spellings[key].append(endpoint)
            pair = tuple(sorted((oracle_normalize_name(src), oracle_normalize_name(tgt))))
            rel_raws[pair].append((chunk_id, desc, strength))

    entity_names = sorted(raw_entities_by_name)
    entity_id_of = {name: f"ent-{i:04d}" for i, name in enumerate(entity_names)}
    rel_pairs = sorted(rel_raws)
    rel_id_of = {pair: f"rel-{i:04d}" for i, pair in enumerate(rel_pairs)}
    rel_weights = {pair: round(sum(s for _, _, s in raws), 6) for pair, raws in rel_raws.items()}

    def display_name(key: str) -> str:
        counts = Counter(entity_name_spellings[key])
        top = max(counts.values())
        return sorted(n for n, c in counts.items() if c == top)[0]

    # consolidation calls expected: >=2 distinct non-empty descriptions
    multi_desc_entities = [
        key
        for key, raws in raw_entities_by_name.items()
        if len({d for _, _, d in raws if d.strip()}) >= 2
    ]
    multi_desc_rels = [
        pair
        for pair, raws in rel_raws.items()
        if len({d for _, d, _ in raws if d.strip()}) >= 2
    ]
    assert multi_desc_entities == ["EUROPEAN COMMISSION"], multi_desc_entities
    assert multi_desc_rels == [("HAMAS", "ISRAEL")], multi_desc_rels

    script_entries.append(
        {
            "stage": "merge_entity",
            "match_substrings": ["European Commission"],
            "response": "Executive arm of the European Union, responsible for digital policy enforcement.",
        }
    )
    script_entries.append(
        {
            "stage": "merge_relationship",
            "match_substrings": ["HAMAS -- ISRAEL"],
            "response": "Armed conflict and war in Gaza between the two sides.",
        }
    )

    # ---- summarize entries -------------------------------------------------
    label_members = {
        "A": TOPIC_DESIGN["level0"][0],
        "A1": TOPIC_DESIGN["level1"]["ISRAEL"][0],
        "A2": TOPIC_DESIGN["level1"]["ISRAEL"][1],
        "B": TOPIC_DESIGN["level0"][1],
        "B1": TOPIC_DESIGN["level1"]["META"][0],
        "B2": TOPIC_DESIGN["level1"]["META"][1],
        "C": TOPIC_DESIGN["level0"][2],
        "D": TOPIC_DESIGN["level0"][3],
        "E": TOPIC_DESIGN["level0"][4],
        "F": TOPIC_DESIGN["level0"][5],
    }
    for label, matchers in SUMMARIZE_ORDER:
        script_entries.append(
            {"stage": "summarize", "match_substrings": matchers, "response": REPORT_TEXTS[label]}
        )
        # every matcher must name an entity line this topic's prompt will contain
        members = {m for m in label_members[label]}
        for matcher in matchers:
            name = matcher[2:]
            assert oracle_normalize_name(name) in members, (label, matcher)

    # ---- retrieval- and diagnosis-side entries ------------------------------
    script_entries.append(
        {
            "stage": "retrieve_infer",
            "match_substrings": ["more than two major digital acts"],
            "response": ACTUAL_INFER_RESPONSE,
        }
    )
    script_entries.append(
        {
            "stage": "evaluate",
            "match_substrings": ["Ground truth: European Commission", "Actual answer: Meta"],
            "response": EVALUATE_RESPONSE,
        }
    )
    script_entries.append(
        {
            "stage": "expand_fact",
            "match_substrings": ["Fact: The European Commission previously focused"],
            "response": EXPAND_F1_RESPONSE,
        }
    )
    script_entries.append(
        {
            "stage": "expand_fact",
            "match_substrings": ["Fact: The European Commission is enforcing"],
            "response": EXPAND_F2_RESPONSE,
        }
    )
    script_entries.append(
        {
            "stage": "gt_infer",
            "match_substrings": ["Ground truth: European Commission", "Expanded facts:"],
            "response": GT_INFER_RESPONSE,
        }
    )

    # Fact subgraph candidates, re-derived: entities with the fact chunk among
    # their chunks, then internal relationships extracted from that chunk.
    def fact_candidates(chunk_id: str) -> tuple[list[str], list[tuple[str, str]]]:
        ents = sorted(key for key, chunks in entity_chunks.items() if chunk_id in chunks)
        inside = set(ents)
        rels = sorted(
            pair
            for pair, raws in rel_raws.items()
            if any(cid == chunk_id for cid, _, _ in raws)
            and pair[0] in inside
            and pair[1] in inside
        )
        return ents, rels

    assert len(fact_chunks[1]) == 1 and len(fact_chunks[2]) == 1, fact_chunks
    f1_chunk, f2_chunk = fact_chunks[1][0], fact_chunks[2][0]
    f1_ents, f1_rels = fact_candidates(f1_chunk)
    f2_ents, f2_rels = fact_candidates(f2_chunk)
    assert f1_ents == ["EUROPEAN COMMISSION", "HAMAS", "ISRAEL"], f1_ents
    assert f1_rels == [], f1_rels  # the famous no-relationship extraction
    assert f2_ents == ["DMA", "DSA", "EUROPEAN COMMISSION", "META"], f2_ents
    assert f2_rels == [("DMA", "META"), ("DSA", "META")], f2_rels

    fact_cand_lists = {1: (f1_ents, f1_rels), 2: (f2_ents, f2_rels)}
    gt_used: dict[str, list[int]] = defaultdict(list)
    for ordinal, (fact_ord, keep_ents, keep_rels) in GT_STEP_KEEPS.items():
        ents, rels = fact_cand_lists[fact_ord]
        candidates = list(ents) + [rel_id_of[p] for p in rels]
        handles = []
        for name in keep_ents:
            handles.append(f"[C{candidates.index(name) + 1}]")
            gt_used[name].append(ordinal)
        for pair in keep_rels:
            handles.append(f"[C{candidates.index(rel_id_of[pair]) + 1}]")
            gt_used["|".join(pair)].append(ordinal)
        script_entries.append(
            {
                "stage": "filter_subgraph",
                "match_substrings": FILTER_MATCHERS[ordinal],
                "response": "Keep: " + " ".join(handles),
            }
        )

    # ---- fixture-wide assertions --------------------------------------------
    ec_raws = raw_entities_by_name["EUROPEAN COMMISSION"]
    assert len(ec_raws) == 11, f"EUROPEAN COMMISSION raw count {len(ec_raws)}"
    assert len(entity_chunks["EUROPEAN COMMISSION"]) == 11
    assert display_name("EUROPEAN COMMISSION") == "European Commission"
    assert len({s for s in entity_name_spellings["EUROPEAN COMMISSION"]}) >= 3  # case variety
    assert len(entity_names) == 28, len(entity_names)
    assert len(rel_pairs) == 36, len(rel_pairs)
    assert raw_rel_count == 72, raw_rel_count
    assert rel_weights[("HAMAS", "ISRAEL")] == 2.7
    assert max(w for p, w in rel_weights.items() if p != ("HAMAS", "ISRAEL")) <= 1.8
    assert len(all_chunk_ids) == 42, len(all_chunk_ids)
    # topic design covers the entity set exactly
    level0_union = sorted(n for members in TOPIC_DESIGN["level0"] for n in members)
    assert level0_union == entity_names, "topic design out of sync with entities"
    # question mentions exactly the two conflict parties at token boundaries
    q_tokens = [t for t in _tokenize_matchable(QUESTION)]
    mentioned = sorted(
        name
        for name in entity_names
        if _sublist(q_tokens, _tokenize_matchable(name)) >= 0
    )
    assert mentioned == ["HAMAS", "ISRAEL"], mentioned
    # facts are verbatim in exactly one chunk each
    for fact, chunk_id in ((FACT1, f1_chunk), (FACT2, f2_chunk)):
        holders = [
            cid
            for cid, text in chunk_texts.items()
            if oracle_normalize_text(fact) in oracle_normalize_text(text)
        ]
        assert holders == [chunk_id], (fact[:40], holders)

    act_used = {"ISRAEL": [1, 4, 5], "HAMAS": [1, 4], "HAMAS|ISRAEL": [3, 5]}
    missing = sorted(set(gt_used) - set(act_used))
    unexpected = sorted(set(act_used) - set(gt_used))
    assert missing == ["DMA|META", "EUROPEAN COMMISSION"], missing
    assert unexpected == ["HAMAS|ISRAEL"], unexpected

    # ---- manifest -----------------------------------------------------------
    manifest = {
        "config": {
            "chunk_size": CHUNK_SIZE,
            "overlap": OVERLAP,
            "min_split_size": 5,
            "max_levels": 2,
            "k_entities": 10,
            "k_relationships": 10,
            "k_reports": 3,
            "llm_titles": False,
        },
        "counts": {
            "documents": len(DOCS),
            "chunks": len(all_chunk_ids),
            "raw_entities": raw_entity_count,
            "raw_relationships": raw_rel_count,
            "entities": len(entity_names),
            "relationships": len(rel_pairs),
            "topics": 10,
            "reports": 10,
            "build_invocations": len(all_chunk_ids) + 1 + 1 + 10,
        },
        "entity_ids": entity_id_of,
        "relationship_ids": {"|".join(p): rid for p, rid in rel_id_of.items()},
        "relationship_weights": {"|".join(p): w for p, w in rel_weights.items()},
        "european_commission": {
            "normalized_name": "EUROPEAN COMMISSION",
            "display_name": "European Commission",
            "raw_count": 11,
            "chunk_count": 11,
        },
        "fact_chunks": {"1": f1_chunk, "2": f2_chunk},
        "topics": TOPIC_DESIGN,
        "meta_topic_members": TOPIC_DESIGN["level1"]["META"][0],
        "report_texts": REPORT_TEXTS,
        "query": {
            "question": QUESTION,
            "query_entities": ["ISRAEL", "HAMAS"],
            "answer": "Meta",
            "steps": 5,
            "act_used": act_used,
        },
        "diagnosis": {
            "pair_id": "pair-0001",
            "verdict": "wrong",
            "score": 0.15,
            "discrepancy_fact_ordinals": [1, 2],
            "gt_used": {k: sorted(v) for k, v in gt_used.items()},
            "missing": missing,
            "unexpected": unexpected,
            "cli_line": "pair-0001: wrong missing=2 unexpected=1",
        },
        "topic_distances": [
            ["META", "DSA", 0],
            ["ISRAEL", "HAMAS", 0],
            ["EUROPEAN COMMISSION", "THIERRY BRETON", 0],
            ["ISRAEL", "IDF", 2],
            ["META", "TIKTOK", 2],
            ["EPIC", "BITCOIN", 2],
            ["EUROPEAN COMMISSION", "ISRAEL", 3],
            ["META", "EUROPEAN COMMISSION", 3],
            ["META", "ISRAEL", 4],
        ],
    }

    (HERE / "docs.jsonl").write_text(
        "".join(json.dumps(row) + "\n" for row in doc_rows), encoding="utf-8"
    )
    (HERE / "script.jsonl").write_text(
        "".join(json.dumps(entry) + "\n" for entry in script_entries), encoding="utf-8"
    )
    pair_row = {
        "id": "pair-0001",
        "question": QUESTION,
        "answer": GROUND_TRUTH,
        "evidence": [
            {"fact": FACT1, "source_title": DOCS[1]["title"]},
            {"fact": FACT2, "source_title": DOCS[2]["title"]},
        ],
    }
    (HERE / "pairs.jsonl").write_text(json.dumps(pair_row) + "\n", encoding="utf-8")
    (HERE / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"fixtures written: {len(doc_rows)} docs, {len(all_chunk_ids)} chunks, "
        f"{len(script_entries)} script entries, {raw_entity_count} raw entities"
    )


def _tokenize_matchable(text: str) -> list[str]:
    import re

    return [t for t in re.split(r"[^0-9a-z]+", text.lower()) if t]


def _sublist(haystack: list[str], needle: list[str]) -> int:
    for i in range(len(haystack) - len(needle) + 1):
        if haystack[i : i + len(needle)] == needle:
            return i
    return -1


if __name__ == "__main__":
    build()
