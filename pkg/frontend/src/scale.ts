/** Affine map from a data domain [d0, d1] onto a pixel range [r0, r1]. */
export interface LinearScale {
  domain: [number, number];
  range: [number, number];
  map(value: number): number;
  invert(pixel: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (!Number.isFinite(d0) || !Number.isFinite(d1) || d0 === d1) {
    throw new Error(`degenerate scale domain [${d0}, ${d1}]`);
  }
  const k = (r1 - r0) / (d1 - d0);
  return {
    domain: [d0, d1],
    range: [r0, r1],
    map: (value) => r0 + (value - d0) * k,
    invert: (pixel) => d0 + (pixel - r0) / k,
  };
}

/**
 * Round tick positions covering [lo, hi]: multiples of a 1/2/2.5/5 x 10^k
 * step chosen so roughly `count` ticks land inside the interval.
 */
export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) throw new Error(`invalid tick interval [${lo}, ${hi}]`);
  const rawStep = (hi - lo) / Math.max(1, count);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = 10 * base;
  for (const mult of [1, 2, 2.5, 5]) {
    if (mult * base >= rawStep) {
      step = mult * base;
      break;
    }
  }
  // the epsilon keeps boundary ticks that float division barely misses,
  // e.g. 0.3/0.1 = 2.999...96
  const first = Math.ceil(lo / step - 1e-9);
  const last = Math.floor(hi / step + 1e-9);
  const ticks: number[] = [];
  for (let i = first; i <= last; i++) {
    // snap to the step grid to avoid 0.30000000000000004-style labels
    ticks.push(Number((i * step).toPrecision(12)));
  }
  return ticks;
}

/** Compact tick label: plain decimal where reasonable, exponent otherwise. */
export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e5 || magnitude < 1e-4) {
    return value.toExponential(1).replace("e+", "e").replace(/\.0e/, "e");
  }
  return String(value);
}
