# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

from xml.sax.saxutils import escape


class SvgCanvas:
    """A minimal SVG 1.1 document builder.

    Shapes are appended in drawing order; `document()` closes the root element.
    """

    def __init__(self, width: float, height: float) -> None:
        self.width = width
        self.height = height
        self._parts: list[str] = [
            '<?xml version="1.0" standalone="no"?>\n',
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n',
            f'<svg version="1.1" width="{width:.0f}" height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}" '
            'xmlns="http://www.w3.org/2000/svg">\n',
        ]

    def group_start(self, group_id: str, title: str = "") -> None:
        self._parts.append(f'<g id="{escape(group_id)}">\n')
        if title:
            self._parts.append(f'<title>{escape(title)}</title>\n')

    def group_end(self) -> None:
        self._parts.append('</g>\n')

    def rect(self, x: float, y: float, width: float, height: float, fill: str,
             stroke: str = "black", css_class: str = "") -> None:
        extra = f' class="{css_class}"' if css_class else ''
        self._parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{width:.2f}" height="{height:.2f}" '
                           f'fill="{fill}" stroke="{stroke}"{extra}/>\n')

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "black") -> None:
        self._parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{stroke}"/>\n')

    def circle(self, cx: float, cy: float, r: float, fill: str, css_class: str = "") -> None:
        extra = f' class="{css_class}"' if css_class else ''
        self._parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{fill}"{extra}/>\n')

    def text(self, x: float, y: float, content: str, size: int = 10, anchor: str = "start") -> None:
        self._parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
                           f'text-anchor="{anchor}">{escape(content)}</text>\n')

    def document(self) -> str:
        return ''.join(self._parts) + '</svg>\n'


def nice_ticks(upper: float, count: int = 10) -> list[float]:
    """Evenly spaced round tick values covering `[0, upper]`."""
    if upper <= 0:
        return [0.0]
    raw = upper / count
    magnitude = 10 ** len(str(int(raw))) / 10 if raw >= 1 else 0.1
    step = next(m * magnitude for m in (1, 2, 5, 10) if m * magnitude >= raw)
    ticks, t = [], 0.0
    while t <= upper + 1e-9:
        ticks.append(round(t, 6))
        t += step
    return ticks
