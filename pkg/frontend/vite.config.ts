import { defineConfig } from "vitest/config";

export default defineConfig({
  build: { outDir: "dist" },
  server: {
    proxy: {
      // dev-mode convenience: forward API calls to a locally served index
      "/api": "http://127.0.0.1:8008",
    },
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
