/** Minimal SVG string assembly: elements, attribute escaping, number layout. */

export type Attrs = Record<string, string | number>;

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

export function escapeXml(text: string): string {
  return text.replace(/[&<>"]/g, (ch) => ESCAPES[ch]!);
}

/** Fixed-point pixel coordinate; 3 decimals keeps curves invertible to ~1e-3 px. */
export function px(value: number): string {
  const s = value.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

function attrString(attrs: Attrs): string {
  const parts = Object.entries(attrs).map(([k, v]) => `${k}="${escapeXml(String(v))}"`);
  return parts.length > 0 ? " " + parts.join(" ") : "";
}

export function el(tag: string, attrs: Attrs, ...children: string[]): string {
  const body = children.join("");
  return body === ""
    ? `<${tag}${attrString(attrs)}/>`
    : `<${tag}${attrString(attrs)}>${body}</${tag}>`;
}

export function text(attrs: Attrs, content: string): string {
  return el("text", attrs, escapeXml(content));
}

/** Space-separated "x,y" pairs for a <polyline>, one pair per input point. */
export function polylinePoints(xs: readonly number[], ys: readonly number[]): string {
  if (xs.length !== ys.length) {
    throw new Error(`point count mismatch: ${xs.length} x values vs ${ys.length} y values`);
  }
  const pairs: string[] = new Array(xs.length);
  for (let i = 0; i < xs.length; i++) pairs[i] = `${px(xs[i]!)},${px(ys[i]!)}`;
  return pairs.join(" ");
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    body +
    "\n</svg>\n"
  );
}
