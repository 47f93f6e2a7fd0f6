import numpy as np
import pytest
from PIL import Image

from foragesim.cli import main
from foragesim.errors import FrameFormatError
from foragesim.recording import read_frame, write_frame
from foragesim.render import RenderOptions, render_frame, world_to_pixel
from test_dynamics import make_agents
from test_resources import make_resources


EXTENT = (100.0, 100.0)


def write_test_frame(path, agent_rows, resource_rows):
    agents = make_agents(
        [r[:2] for r in agent_rows] or np.zeros((0, 2)),
        [r[2:4] for r in agent_rows] or None,
        capacity=max(len(agent_rows), 1),
    )
    if not agent_rows:
        agents = agents.replace(active=np.zeros(1, dtype=bool))
    resources = make_resources(
        [r[:2] for r in resource_rows] or np.zeros((0, 2)),
        [r[2] for r in resource_rows],
        capacity=max(len(resource_rows), 1),
    )
    write_frame(path, agents, resources, EXTENT)


def test_frame_roundtrip(tmp_path):
    path = tmp_path / "frame_00000000.csv"
    write_test_frame(path, [(10.0, 20.0, 1.0, -0.5)], [(30.0, 40.0, 55.0)])
    extent, agents, resources = read_frame(path)
    assert extent == EXTENT
    assert len(agents) == 1 and len(resources) == 1
    uid, x, y, vx, vy, energy = agents[0]
    assert (x, y, vx, vy) == (10.0, 20.0, 1.0, -0.5)
    assert resources[0] == (30.0, 40.0, 55.0)


def test_empty_frame_renders_blank_canvas(tmp_path):
    path = tmp_path / "frame_00000000.csv"
    write_test_frame(path, [], [])
    n_agents, n_resources = render_frame(path, options=RenderOptions(size=64))
    assert (n_agents, n_resources) == (0, 0)
    img = np.asarray(Image.open(path.with_suffix(".png")))
    assert img.shape == (64, 64, 3)
    assert np.all(img == 255)


def test_centered_agent_with_rightward_tick(tmp_path):
    size = 201
    path = tmp_path / "frame_00000000.csv"
    write_test_frame(path, [(50.0, 50.0, 1.0, 0.0)], [])
    render_frame(path, options=RenderOptions(size=size, agent_radius_px=3, tick_px=10))
    img = np.asarray(Image.open(path.with_suffix(".png")))
    px, py = world_to_pixel(50.0, 50.0, EXTENT, size)
    cx, cy = round(px), round(py)
    assert (cx, cy) == (100, 100)
    # blue disk at the center
    assert tuple(img[cy, cx]) != (255, 255, 255)
    # tick extends to the right (+x in world = +x in image), not to the left
    assert tuple(img[cy, cx + 9]) != (255, 255, 255)
    assert tuple(img[cy, cx - 9]) == (255, 255, 255)
    # y axis flip: nothing above or below beyond the disk radius
    assert tuple(img[cy + 9, cx]) == (255, 255, 255)
    assert tuple(img[cy - 9, cx]) == (255, 255, 255)


def test_upward_velocity_tick_points_up_in_image(tmp_path):
    size = 201
    path = tmp_path / "frame_00000000.csv"
    write_test_frame(path, [(50.0, 50.0, 0.0, 1.0)], [])
    render_frame(path, options=RenderOptions(size=size, agent_radius_px=2, tick_px=10))
    img = np.asarray(Image.open(path.with_suffix(".png")))
    # world +y is image up (smaller row index)
    assert tuple(img[100 - 9, 100]) != (255, 255, 255)
    assert tuple(img[100 + 9, 100]) == (255, 255, 255)


def test_resource_radius_scales_with_value(tmp_path):
    size = 301
    a = tmp_path / "frame_00000000.csv"
    write_test_frame(a, [], [(50.0, 50.0, 100.0)])
    render_frame(a, options=RenderOptions(size=size, resource_px_per_unit=0.1))
    img = np.asarray(Image.open(a.with_suffix(".png")))
    red = (np.asarray(img)[:, :, 0] > 200) & (np.asarray(img)[:, :, 2] < 100)
    # radius 10px disk -> roughly pi * 100 red pixels
    assert 250 < red.sum() < 400


def test_render_is_deterministic(tmp_path):
    path = tmp_path / "frame_00000000.csv"
    write_test_frame(path, [(10.0, 80.0, 0.3, 0.4), (60.0, 60.0, 0.0, 0.0)],
                     [(30.0, 40.0, 70.0)])
    out1 = tmp_path / "a.png"
    out2 = tmp_path / "b.png"
    render_frame(path, out1)
    render_frame(path, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_malformed_frame_names_file_and_line(tmp_path):
    path = tmp_path / "frame_00000007.csv"
    good = "# world_extent,100.0,100.0\nkind,uid,x,y,vx,vy,value\n"
    path.write_text(good + "agent,1,5.0,5.0\n")
    with pytest.raises(FrameFormatError) as exc:
        read_frame(path)
    assert exc.value.line_no == 3
    assert str(path) in str(exc.value)

    path.write_text(good + "agent,one,5.0,5.0,0.0,0.0,1.0\n")
    with pytest.raises(FrameFormatError):
        read_frame(path)

    path.write_text(good + "dragon,1,5.0,5.0,0.0,0.0,1.0\n")
    with pytest.raises(FrameFormatError):
        read_frame(path)

    path.write_text("kind,uid,x,y,vx,vy,value\nagent,1,5.0,5.0,0.0,0.0,1.0\n")
    with pytest.raises(FrameFormatError, match="world_extent"):
        read_frame(path)


def test_render_cli_on_directory_and_error_path(tmp_path, capsys):
    frames = tmp_path / "frames"
    frames.mkdir()
    write_test_frame(frames / "frame_00000000.csv", [(10.0, 10.0, 0.0, 0.0)],
                     [(20.0, 20.0, 50.0)])
    write_test_frame(frames / "frame_00000005.csv", [(11.0, 10.0, 1.0, 0.0)],
                     [(20.0, 20.0, 40.0)])
    out = tmp_path / "png"
    code = main(["render", "--frames", str(frames), "--out", str(out), "--size", "128"])
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "frame_00000000.png", "frame_00000005.png",
    ]
    assert "2 resources" not in capsys.readouterr().out  # one resource per frame

    broken = tmp_path / "broken.csv"
    broken.write_text("# world_extent,100.0,100.0\nkind,uid,x,y,vx,vy,value\nagent,nope\n")
    code = main(["render", "--frames", str(broken)])
    assert code == 2
    err = capsys.readouterr().err
    assert "broken.csv" in err and ":3:" in err
