"""Offline frame rendering: snapshot CSV -> raster PNG.

World-to-pixel map (documented, frozen): a world point (x, y) lands at
pixel (x / Lx * (size - 1), (1 - y / Ly) * (size - 1)) — linear, y flipped
so world-up is image-up. Resources draw first as red disks with radius
proportional to their value; agents draw as blue disks with a velocity
tick. Output is deterministic for a given frame file and options.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from PIL import Image, ImageDraw

from .recording import read_frame
from .sensors import STILL_SPEED

RESOURCE_COLOR = (214, 39, 40)
AGENT_COLOR = (31, 90, 180)
BACKGROUND = (255, 255, 255)


@dataclass(frozen=True)
class RenderOptions:
    size: int = 1024
    resource_px_per_unit: float = 0.08  # disk radius = value * this, min 1 px
    agent_radius_px: float = 3.0
    tick_px: float = 8.0


def world_to_pixel(x: float, y: float, extent, size: int) -> tuple[float, float]:
    lx, ly = extent
    return x / lx * (size - 1), (1.0 - y / ly) * (size - 1)


def render_frame(frame_path, out_path=None, options: RenderOptions = RenderOptions(),
                 extent=None) -> tuple[int, int]:
    """Render one frame file; returns (agents drawn, resources drawn).

    `extent` overrides the frame's own world_extent header if given.
    Default output path replaces the .csv suffix with .png.
    """
    frame_path = Path(frame_path)
    file_extent, agents, resources = read_frame(frame_path)
    if extent is None:
        extent = file_extent
    if out_path is None:
        out_path = frame_path.with_suffix(".png")

    size = options.size
    img = Image.new("RGB", (size, size), BACKGROUND)
    draw = ImageDraw.Draw(img)

    for x, y, value in resources:
        px, py = world_to_pixel(x, y, extent, size)
        radius = max(1.0, value * options.resource_px_per_unit)
        draw.ellipse([px - radius, py - radius, px + radius, py + radius],
                     fill=RESOURCE_COLOR)

    for _uid, x, y, vx, vy, _energy in agents:
        px, py = world_to_pixel(x, y, extent, size)
        radius = options.agent_radius_px
        draw.ellipse([px - radius, py - radius, px + radius, py + radius],
                     fill=AGENT_COLOR)
        speed = math.hypot(vx, vy)
        if speed >= STILL_SPEED:
            # velocity tick; pixel y grows downward, world y upward
            tx = px + vx / speed * options.tick_px
            ty = py - vy / speed * options.tick_px
            draw.line([px, py, tx, ty], fill=AGENT_COLOR, width=1)

    img.save(out_path, format="PNG")
    return len(agents), len(resources)
