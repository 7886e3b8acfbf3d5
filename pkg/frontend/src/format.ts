/** Display formatting shared by every view. */

/**
 * Probabilities and utilities are truncated to three decimals, not rounded,
 * matching the reference decision tables this page is checked against
 * (0.4806... must display as 0.480, never 0.481). The small epsilon keeps
 * values that are exact in decimal, like 0.06, from truncating down a digit.
 */
export function fmt3(value: number): string {
  const sign = value < 0 ? -1 : 1;
  const scaled = (sign * Math.trunc(Math.abs(value) * 1000 + 1e-9)) / 1000;
  const text = scaled.toFixed(3);
  return text === "-0.000" ? "0.000" : text;
}

/** Two-decimal display for the reweighting sliders. */
export function fmtWeight(value: number): string {
  return value.toFixed(2);
}
