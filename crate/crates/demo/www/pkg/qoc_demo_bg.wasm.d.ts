/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_generatedbasis_free: (a: number, b: number) => void;
export const builtinBasis: (a: number, b: number) => [number, number, number];
export const generateBasis: (a: number, b: number, c: number, d: number) => [number, number, number];
export const generatedbasis_count: (a: number) => number;
export const generatedbasis_dim: (a: number) => number;
export const generatedbasis_maxAbsDot: (a: number) => number;
export const generatedbasis_minAngle: (a: number) => number;
export const generatedbasis_text: (a: number) => [number, number];
export const generatedbasis_vectors: (a: number) => [number, number];
export const planePoints: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const planeVectors: (a: number, b: number) => [number, number, number, number];
export const qsoftmaxProbe: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_export_0: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
