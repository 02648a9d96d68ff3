export * from './rng.js';
export * from './linalg.js';
export * from './niw.js';
export * from './data.js';
export * from './model.js';
export * from './reference.js';
export * from './loss.js';
export * from './weights.js';
export * from './train.js';
