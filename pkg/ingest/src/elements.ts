/** Element data for the organic subset plus the common hetero elements. */

export const ATOMIC_WEIGHTS: Record<string, number> = {
  H: 1.008,
  B: 10.811,
  C: 12.011,
  N: 14.007,
  O: 15.999,
  F: 18.998,
  Na: 22.99,
  Mg: 24.305,
  Si: 28.086,
  P: 30.974,
  S: 32.06,
  Cl: 35.453,
  K: 39.098,
  Ca: 40.078,
  Fe: 55.845,
  Zn: 65.38,
  Se: 78.971,
  Br: 79.904,
  I: 126.904,
};

export const ATOMIC_NUMBERS: Record<string, number> = {
  H: 1, B: 5, C: 6, N: 7, O: 8, F: 9, Na: 11, Mg: 12, Si: 14, P: 15, S: 16,
  Cl: 17, K: 19, Ca: 20, Fe: 26, Zn: 30, Se: 34, Br: 35, I: 53,
};

/** Standard valence lists used to fill implicit hydrogens. */
export const DEFAULT_VALENCES: Record<string, number[]> = {
  B: [3],
  C: [4],
  N: [3, 5],
  O: [2],
  P: [3, 5],
  S: [2, 4, 6],
  F: [1],
  Cl: [1],
  Br: [1],
  I: [1],
};

/** Elements the SMILES organic subset may write without brackets. */
export const ORGANIC_SUBSET = new Set(["B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"]);
