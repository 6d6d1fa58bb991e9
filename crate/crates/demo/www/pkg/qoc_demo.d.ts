/* tslint:disable */
/* eslint-disable */
export function planePoints(mode: string, samples: number, radius: number, seed: number): Float64Array;
export function planeVectors(mode: string): Float64Array;
export function generateBasis(dim: number, count: number, max_dot: number, seed: number): GeneratedBasis;
export function builtinBasis(name: string): GeneratedBasis;
export function qsoftmaxProbe(basis_text: string, z: Float64Array): Float64Array;
/**
 * A generated basis together with its validation numbers.
 */
export class GeneratedBasis {
  private constructor();
  free(): void;
  maxAbsDot(): number;
  dim(): number;
  /**
   * The set in `qoc-basis v1` format.
   */
  text(): string;
  count(): number;
  vectors(): Float64Array;
  /**
   * Smallest angle between two basis lines, in degrees.
   */
  minAngle(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
  readonly memory: WebAssembly.Memory;
  readonly __wbg_generatedbasis_free: (a: number, b: number) => void;
  readonly builtinBasis: (a: number, b: number) => [number, number, number];
  readonly generateBasis: (a: number, b: number, c: number, d: number) => [number, number, number];
  readonly generatedbasis_count: (a: number) => number;
  readonly generatedbasis_dim: (a: number) => number;
  readonly generatedbasis_maxAbsDot: (a: number) => number;
  readonly generatedbasis_minAngle: (a: number) => number;
  readonly generatedbasis_text: (a: number) => [number, number];
  readonly generatedbasis_vectors: (a: number) => [number, number];
  readonly planePoints: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
  readonly planeVectors: (a: number, b: number) => [number, number, number, number];
  readonly qsoftmaxProbe: (a: number, b: number, c: number, d: number) => [number, number, number, number];
  readonly __wbindgen_export_0: WebAssembly.Table;
  readonly __wbindgen_malloc: (a: number, b: number) => number;
  readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
  readonly __externref_table_dealloc: (a: number) => void;
  readonly __wbindgen_free: (a: number, b: number, c: number) => void;
  readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;
/**
* Instantiates the given `module`, which can either be bytes or
* a precompiled `WebAssembly.Module`.
*
* @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
*
* @returns {InitOutput}
*/
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
* If `module_or_path` is {RequestInfo} or {URL}, makes a request and
* for everything else, calls `WebAssembly.instantiate` directly.
*
* @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
*
* @returns {Promise<InitOutput>}
*/
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
