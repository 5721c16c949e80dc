"""Human-viewable renderings: deterministic DOT text and a self-contained
interactive HTML page.

The HTML page embeds the property-graph document as a JSON data island
(``<script type="application/json" id="cg-data">``) plus a viewer script.
When the compiled viewer asset is present it is embedded; otherwise a small
static fallback renders an SVG and an edge table, so the page always works
offline.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .graph import Graph
from .interchange import export_property_graph


@dataclass
class RenderOptions:
    destination: Optional[Path] = None
    filename: Optional[str] = None
    include_metadata: bool = True


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _edge_label(props: dict) -> str:
    parts = []
    if "confidence" in props:
        parts.append(f"c={props['confidence']!r}")
    if "time_lag_s" in props:
        parts.append(f"lag={props['time_lag_s']!r}s")
    return ", ".join(parts)


def emit_dot(
    graph: Graph,
    destination=None,
    filename: Optional[str] = None,
    include_metadata: bool = True,
) -> str:
    """DOT text for the causal structure; written to a file when a
    destination directory is given, and always returned."""
    doc = export_property_graph(graph)
    causal = set(graph.node_names())
    lines = ["digraph causal {", "  rankdir=LR;"]
    for node in sorted((n for n in doc.nodes if n.name in causal), key=lambda n: n.name):
        attrs = [f"label={_dot_quote(node.name)}"]
        if include_metadata:
            tooltip = "; ".join(graph.model.class_display(t) for t in node.types)
            comments = node.props.get("comments", [])
            if comments:
                tooltip += " | " + " / ".join(comments)
            attrs.append(f"tooltip={_dot_quote(tooltip)}")
        lines.append(f"  {_dot_quote(node.name)} [{', '.join(attrs)}];")
    for edge in sorted(doc.edges, key=lambda e: (e.cause, e.effect, e.name)):
        attrs = []
        if include_metadata:
            label = _edge_label(edge.props)
            if label:
                attrs.append(f"label={_dot_quote(label)}")
            tooltip = edge.name
            comments = edge.props.get("comments", [])
            if comments:
                tooltip += " | " + " / ".join(comments)
            attrs.append(f"edgetooltip={_dot_quote(tooltip)}")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_dot_quote(edge.cause)} -> {_dot_quote(edge.effect)}{suffix};")
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if destination is not None:
        target = Path(destination) / (filename or "graph.dot")
        target.write_text(text, encoding="utf-8")
    return text


def _viewer_script() -> str:
    asset = resources.files("causalkg").joinpath("assets/viewer.js")
    if asset.is_file():
        return asset.read_text(encoding="utf-8")
    return _FALLBACK_VIEWER


def emit_html(
    graph: Graph,
    destination=None,
    filename: Optional[str] = None,
    title: str = "Causal graph",
) -> str:
    """Self-contained interactive HTML; returned, and written to a file
    when a destination directory is given."""
    island = export_property_graph(graph).to_json()
    html = _HTML_TEMPLATE.format(title=title, island=island, script=_viewer_script())
    if destination is not None:
        target = Path(destination) / (filename or "graph.html")
        target.write_text(html, encoding="utf-8")
    return html


_HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8"/>
<title>{title}</title>
<style>
body {{ font-family: sans-serif; margin: 1rem; }}
#cg-banner {{ padding: 0.5rem; background: #fee; border: 1px solid #c99; display: none; }}
#cg-canvas {{ border: 1px solid #ccc; width: 100%; height: 520px; }}
table {{ border-collapse: collapse; margin-top: 1rem; }}
td, th {{ border: 1px solid #aaa; padding: 2px 8px; font-size: 0.9rem; }}
.cg-tooltip {{ position: fixed; background: #ffd; border: 1px solid #996;
  padding: 2px 6px; pointer-events: none; font-size: 0.85rem; }}
</style>
</head>
<body>
<h1>{title}</h1>
<div id="cg-banner"></div>
<div id="cg-root"></div>
<script type="application/json" id="cg-data">
{island}</script>
<script>
{script}
</script>
</body>
</html>
"""

# Minimal static viewer used when the compiled interactive asset is absent:
# renders nodes on a circle with arrows, plus a metadata table. Tooltips via
# <title> elements.
_FALLBACK_VIEWER = """
(function () {
  "use strict";
  function banner(msg) {
    var el = document.getElementById("cg-banner");
    el.textContent = msg;
    el.style.display = "block";
  }
  var islandEl = document.getElementById("cg-data");
  var doc;
  try {
    doc = JSON.parse(islandEl.textContent);
  } catch (err) {
    banner("malformed graph data: " + err.message);
    return;
  }
  var root = document.getElementById("cg-root");
  var nodes = doc.nodes || [];
  var edges = doc.edges || [];
  if (nodes.length === 0 && edges.length === 0) {
    banner("empty graph");
    return;
  }
  var W = 900, H = 500, R = Math.min(W, H) / 2 - 60;
  var svgNS = "http://www.w3.org/2000/svg";
  var svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("id", "cg-canvas");
  svg.setAttribute("viewBox", "0 0 " + W + " " + H);
  var defs = document.createElementNS(svgNS, "defs");
  defs.innerHTML = '<marker id="cg-arrow" viewBox="0 0 10 10" refX="22" refY="5"' +
    ' markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker>';
  svg.appendChild(defs);
  var pos = {};
  nodes.forEach(function (n, i) {
    var angle = (2 * Math.PI * i) / nodes.length - Math.PI / 2;
    pos[n.name] = [W / 2 + R * Math.cos(angle), H / 2 + R * Math.sin(angle)];
  });
  edges.forEach(function (e) {
    var a = pos[e.cause], b = pos[e.effect];
    if (!a || !b) { return; }
    var line = document.createElementNS(svgNS, "line");
    line.setAttribute("class", "cg-edge");
    line.setAttribute("x1", a[0]); line.setAttribute("y1", a[1]);
    line.setAttribute("x2", b[0]); line.setAttribute("y2", b[1]);
    line.setAttribute("stroke", "#555");
    line.setAttribute("marker-end", "url(#cg-arrow)");
    var title = document.createElementNS(svgNS, "title");
    title.textContent = e.name + edgeMeta(e.props);
    line.appendChild(title);
    svg.appendChild(line);
  });
  nodes.forEach(function (n) {
    var p = pos[n.name];
    var g = document.createElementNS(svgNS, "g");
    g.setAttribute("class", "cg-node");
    var circle = document.createElementNS(svgNS, "circle");
    circle.setAttribute("cx", p[0]); circle.setAttribute("cy", p[1]);
    circle.setAttribute("r", 14);
    circle.setAttribute("fill", "#9dc4e8");
    circle.setAttribute("stroke", "#336");
    var label = document.createElementNS(svgNS, "text");
    label.setAttribute("class", "cg-node-label");
    label.setAttribute("x", p[0]); label.setAttribute("y", p[1] - 20);
    label.setAttribute("text-anchor", "middle");
    label.textContent = n.name;
    var title = document.createElementNS(svgNS, "title");
    title.textContent = n.name + " : " + (n.types || []).join(", ");
    g.appendChild(circle); g.appendChild(label); g.appendChild(title);
    svg.appendChild(g);
  });
  root.appendChild(svg);

  function fmt(x) {
    return (typeof x === "number" && Number.isInteger(x)) ? x.toFixed(1) : String(x);
  }
  function edgeMeta(props) {
    props = props || {};
    var parts = [];
    if ("confidence" in props) { parts.push("c=" + fmt(props.confidence)); }
    if ("time_lag_s" in props) { parts.push("lag=" + fmt(props.time_lag_s) + "s"); }
    return parts.length ? " (" + parts.join(", ") + ")" : "";
  }
  var table = document.createElement("table");
  table.innerHTML = "<tr><th>edge</th><th>cause</th><th>effect</th>" +
    "<th>confidence</th><th>lag (s)</th></tr>";
  edges.forEach(function (e) {
    var row = document.createElement("tr");
    row.className = "cg-edge-row";
    [e.name, e.cause, e.effect,
     "confidence" in (e.props || {}) ? fmt(e.props.confidence) : "",
     "time_lag_s" in (e.props || {}) ? fmt(e.props.time_lag_s) : ""
    ].forEach(function (cell) {
      var td = document.createElement("td");
      td.textContent = cell;
      row.appendChild(td);
    });
    table.appendChild(row);
  });
  root.appendChild(table);
})();
"""
