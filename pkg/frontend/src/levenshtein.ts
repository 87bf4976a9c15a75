/** Unit-cost Levenshtein distance over Unicode code points.
 *
 * This mirrors the server's accounting exactly, which is what makes the
 * live preview trustworthy: strings are sequences of code points (an
 * astral-plane emoji is one edit, not two UTF-16 halves), common prefixes
 * and suffixes are stripped, and the remainder runs through the standard
 * two-row dynamic program.
 */
export function levenshtein(a: string, b: string): number {
  if (a === b) {
    return 0;
  }
  const xs = Array.from(a);
  const ys = Array.from(b);
  let lo = 0;
  const limit = Math.min(xs.length, ys.length);
  while (lo < limit && xs[lo] === ys[lo]) {
    lo += 1;
  }
  let hi = 0;
  while (hi < limit - lo && xs[xs.length - 1 - hi] === ys[ys.length - 1 - hi]) {
    hi += 1;
  }
  let s = xs.slice(lo, xs.length - hi);
  let t = ys.slice(lo, ys.length - hi);
  if (s.length === 0) {
    return t.length;
  }
  if (t.length === 0) {
    return s.length;
  }
  if (t.length > s.length) {
    [s, t] = [t, s];
  }
  let prev = new Array<number>(t.length + 1);
  for (let j = 0; j <= t.length; j += 1) {
    prev[j] = j;
  }
  for (let i = 1; i <= s.length; i += 1) {
    const cur = new Array<number>(t.length + 1);
    cur[0] = i;
    for (let j = 1; j <= t.length; j += 1) {
      cur[j] = Math.min(
        prev[j] + 1,
        cur[j - 1] + 1,
        prev[j - 1] + (s[i - 1] === t[j - 1] ? 0 : 1),
      );
    }
    prev = cur;
  }
  return prev[t.length];
}
