/** Server-side SVG rendering (no DOM, no rasterizer). */
import * as echarts from "echarts";
import { buildOption, FigureRequest } from "./figures.js";

export interface RenderOptions {
  width?: number;
  height?: number;
}

export function renderSvg(request: FigureRequest, options: RenderOptions = {}): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: options.width ?? 760,
    height: options.height ?? 480,
  });
  try {
    chart.setOption(buildOption(request));
    return canonicalizeIds(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

/**
 * zrender numbers class and clip-path ids from process-global counters
 * (zr3-cls-17, zr3-c4), so two renders of the same request differ in ids
 * only.  Renumber them by first appearance to make output byte-stable.
 */
function canonicalizeIds(svg: string): string {
  let out = svg.replace(/\bzr\d+-/g, "zr-");
  for (const pattern of [/\bzr-cls-\d+\b/g, /\bzr-c\d+\b/g]) {
    const seen = new Map<string, string>();
    out = out.replace(pattern, (token) => {
      if (!seen.has(token)) {
        const stem = token.slice(0, token.length - token.match(/\d+$/)![0].length);
        seen.set(token, `${stem}${seen.size}`);
      }
      return seen.get(token)!;
    });
  }
  return out;
}
