import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // The round-trip test shells out to the Python engine twice.
    testTimeout: 120_000,
  },
});
