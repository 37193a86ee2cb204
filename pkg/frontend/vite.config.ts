import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // dev convenience: same-origin /api calls hit a locally running service
    proxy: { "/api": "http://127.0.0.1:8080" },
  },
  test: {
    environment: "node",
    setupFiles: ["tests/setup.ts"],
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
