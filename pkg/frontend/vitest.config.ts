import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the integration suite spawns the Python service and waits for real runs
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
