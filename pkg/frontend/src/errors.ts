/** Structured errors crossing the binding boundary. */

export type BindingErrorCode =
  | "shape_mismatch"
  | "bad_layout"
  | "non_finite_row"
  | "bad_stats"
  | "bad_quaternion"
  | "out_of_range";

/**
 * Every failure surfaces as a BindingError carrying a machine-readable
 * code and, for row-wise failures, the offending row index.
 */
export class BindingError extends Error {
  readonly code: BindingErrorCode;
  readonly row?: number;

  constructor(code: BindingErrorCode, message: string, row?: number) {
    super(row === undefined ? message : `${message} (row ${row})`);
    this.name = "BindingError";
    this.code = code;
    this.row = row;
  }
}
