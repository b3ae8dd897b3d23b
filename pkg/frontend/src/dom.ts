// Tiny DOM/SVG builders; no framework.

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function svg<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}

/** Sentence ids stored on highlightable elements. */
export function setIds(node: Element, ids: number[]): void {
  node.setAttribute("data-sids", ids.join(","));
}

export function getIds(node: Element): number[] {
  const raw = node.getAttribute("data-sids");
  if (!raw) {
    return [];
  }
  return raw.split(",").map((s) => parseInt(s, 10));
}

/**
 * Toggle the highlight class on every [data-sids] element under root:
 * highlighted iff it shares at least one id with the resolved set.
 * The intersecting ids are recorded on the element, so aggregate marks
 * (sankey links, nodes) report exactly the sentences that caused them.
 */
export function applyHighlight(root: Element, highlighted: number[]): void {
  const set = new Set(highlighted);
  for (const node of root.querySelectorAll("[data-sids]")) {
    const hits = getIds(node).filter((id) => set.has(id));
    node.classList.toggle("highlighted", hits.length > 0);
    if (hits.length > 0) {
      node.setAttribute("data-hits", hits.join(","));
    } else {
      node.removeAttribute("data-hits");
    }
  }
}

/** Union of ids that caused highlights under root, from the DOM. */
export function highlightedIds(root: Element): number[] {
  const ids = new Set<number>();
  for (const node of root.querySelectorAll(".highlighted[data-hits]")) {
    for (const raw of (node.getAttribute("data-hits") ?? "").split(",")) {
      if (raw) {
        ids.add(parseInt(raw, 10));
      }
    }
  }
  return [...ids].sort((a, b) => a - b);
}
