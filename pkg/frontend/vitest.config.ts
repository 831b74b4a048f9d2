import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // every binding call shells out to the CLI, which pays an
    // interpreter start per invocation
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
