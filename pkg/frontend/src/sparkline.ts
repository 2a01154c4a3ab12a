/** Inline SVG sparkline for a windowed heart-rate series. Null samples
 * (noisy windows) break the line into gaps and are marked separately. */

export interface SparklineOptions {
  width?: number;
  height?: number;
  strokeWidth?: number;
  pad?: number;
}

function scale(values: number[], lo: number, hi: number, outLo: number, outHi: number): number[] {
  const span = hi - lo || 1;
  return values.map((v) => outLo + ((v - lo) / span) * (outHi - outLo));
}

export function sparkline(bpm: (number | null)[], opts: SparklineOptions = {}): string {
  const width = opts.width ?? 160;
  const height = opts.height ?? 36;
  const strokeWidth = opts.strokeWidth ?? 1.5;
  const pad = opts.pad ?? 3;

  const finite = bpm.filter((v): v is number => v !== null && Number.isFinite(v));
  if (finite.length === 0) {
    return (
      `<svg class="sparkline sparkline-empty" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" role="img"></svg>`
    );
  }
  const lo = Math.min(...finite);
  const hi = Math.max(...finite);
  const n = bpm.length;
  const xs = scale([...bpm.keys()], 0, Math.max(n - 1, 1), pad, width - pad);
  // SVG y grows downward, so the scale is flipped
  const ys = bpm.map((v) =>
    v === null || !Number.isFinite(v) ? null : scale([v], lo, hi, height - pad, pad)[0],
  );

  const segments: string[] = [];
  let current: string[] = [];
  ys.forEach((y, i) => {
    if (y === null) {
      if (current.length > 1) segments.push(current.join(" "));
      current = [];
    } else {
      current.push(`${xs[i].toFixed(2)},${y.toFixed(2)}`);
    }
  });
  if (current.length > 1) segments.push(current.join(" "));

  const lines = segments
    .map(
      (pts) =>
        `<polyline fill="none" stroke="currentColor" stroke-width="${strokeWidth}" points="${pts}"/>`,
    )
    .join("");
  const gapMarks = ys
    .map((y, i) =>
      y === null
        ? `<line class="gap" x1="${xs[i].toFixed(2)}" y1="${pad}" x2="${xs[i].toFixed(2)}" y2="${height - pad}" stroke-dasharray="2,2" stroke="currentColor" opacity="0.3"/>`
        : "",
    )
    .join("");

  return (
    `<svg class="sparkline" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
    `role="img" aria-label="heart rate ${lo.toFixed(0)} to ${hi.toFixed(0)} BPM">` +
    `${gapMarks}${lines}</svg>`
  );
}
