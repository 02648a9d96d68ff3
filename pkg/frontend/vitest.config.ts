import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    testTimeout: 120_000,
    hookTimeout: 600_000,
    // training tests are CPU-bound; run files one at a time
    pool: 'forks',
    poolOptions: { forks: { singleFork: true } },
  },
});
