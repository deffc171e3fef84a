import { defineConfig } from "vitest/config";

export default defineConfig({
    test: {
        environment: "node",
        include: ["tests/**/*.test.ts"],
        testTimeout: 120_000,
        hookTimeout: 120_000,
        // the integration suite owns a fixed port; keep files sequential
        fileParallelism: false,
    },
});
