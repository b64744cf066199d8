"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Runs entirely in embedded mode; no network stack, no live engine. Randomized
parts are seeded, so the suite is deterministic.
"""

import base64
import functools
import time
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from fastapi.testclient import TestClient

from imagehunt.compositor import Patch, Placement, Session, mirror_pixels, rotate_quarter
from imagehunt.config import AppConfig
from imagehunt.editscript import run_script
from imagehunt.embedded import Embedded
from imagehunt.fetching import file_link
from imagehunt.gateway import HuntQuery, LocalBackend, hunt, index_corpus, parse_result_page
from imagehunt.gateway.remote import load_fixture_set
from imagehunt.rasters import decode_rgba, encode_png
from imagehunt.server import create_app
from imagehunt.store import AssetStore
from imagehunt.style import transfer_selected_style

from conftest import (
    build_corpus,
    corpus_image,
    encode_image,
    exif_jpeg_bytes,
    noise_rgb,
    texty_png_bytes,
    uniform_rgba,
)
from oracles import brute_force_ranking, channel_mean_std, png_metadata_chunks
from pagefixtures import SELECTOR, render_result_page

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "engine"


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] FAIL {name}")
                raise
            print(f"[acceptance] PASS {name}")
        return wrapper
    return decorate


@pytest.fixture(scope="module")
def acceptance_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance-corpus")
    sidecar = build_corpus(root, count=50)
    return root, sidecar


@criterion("parser fidelity: 10 fixtures exact + 100 round trips, < 1 s")
def test_parser_fidelity():
    start = time.perf_counter()

    fixtures = load_fixture_set(FIXTURE_DIR)
    assert len(fixtures) == 10
    for fixture in fixtures:
        links = parse_result_page(fixture.page, SELECTOR, base_url=fixture.request.url)
        assert links == list(fixture.expected_links), fixture.name

    rng = np.random.default_rng(2024)
    for _ in range(100):
        count = int(rng.integers(0, 20))
        pool = [f"https://corpus.example/items/{int(rng.integers(0, 30))}.png"
                for _ in range(count)]
        parsed = parse_result_page(render_result_page(pool), SELECTOR)
        assert parsed == list(dict.fromkeys(pool))

    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"parser fidelity took {elapsed:.3f}s"


@criterion("retrieval oracle: top-k == brute force for k in {1,5,10,50}, 50 queries")
def test_retrieval_oracle(acceptance_corpus, tmp_path):
    start = time.perf_counter()
    corpus_dir, sidecar = acceptance_corpus
    index = index_corpus(corpus_dir, sidecar).index
    assert len(index) == 50
    backend = LocalBackend(index)

    agreements = 0
    for i in range(50):
        if i % 2 == 0:
            query_link = index.entries[i].link
            query_descriptor = index.entries[i].descriptor
        else:
            probe = tmp_path / f"probe-{i}.png"
            probe.write_bytes(encode_image(corpus_image(500 + i)))
            query_link = file_link(probe)
            from imagehunt.descriptors import compute_descriptor
            query_descriptor = compute_descriptor(decode_rgba(probe.read_bytes()))

        expected = brute_force_ranking(index.entries, query_descriptor)
        for k in (1, 5, 10, 50):
            results = hunt(HuntQuery(image_link=query_link, max_results=k), backend)
            got = [index.lookup_link(r.link).asset_id for r in results]
            assert got == [asset_id for asset_id, _ in expected[:k]], (i, k)
        agreements += 1

    assert agreements == 50
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"retrieval oracle took {elapsed:.1f}s"


@criterion("self-retrieval: 50/50 corpus members rank themselves first at distance 0")
def test_self_retrieval(acceptance_corpus):
    corpus_dir, sidecar = acceptance_corpus
    index = index_corpus(corpus_dir, sidecar).index
    backend = LocalBackend(index)
    hits = 0
    for entry in index.entries:
        results = hunt(HuntQuery(image_link=entry.link, max_results=1), backend)
        assert results[0].link == entry.link
        assert results[0].rank == 0
        assert results[0].distance == 0.0
        hits += 1
    assert hits == 50


@criterion("metadata invariant: 10 tagged inputs stored with zero metadata, pixels intact")
def test_metadata_invariant(tmp_path):
    store = AssetStore(tmp_path / "store")
    inputs = []
    for i in range(5):
        inputs.append(exif_jpeg_bytes(corpus_image(200 + i)))
        inputs.append(texty_png_bytes(corpus_image(300 + i)))
    assert len(inputs) == 10

    for original in inputs:
        asset = store.ingest(original)
        assert png_metadata_chunks(asset.stored_bytes) == []
        assert np.array_equal(asset.pixels, decode_rgba(original))


@criterion("compositor invariants: >= 200 randomized cases plus the 128 example")
def test_compositor_invariants():
    rng = np.random.default_rng(77)
    cases = 0

    def random_rgba(max_side=20):
        h = int(rng.integers(1, max_side))
        w = int(rng.integers(1, max_side))
        arr = rng.integers(0, 256, size=(h, w, 4), dtype=np.uint8)
        arr[0, 0, 3] = 255  # keep at least one visible pixel
        return arr

    for _ in range(50):  # mirror involution
        arr = random_rgba()
        assert np.array_equal(mirror_pixels(mirror_pixels(arr)), arr)
        assert np.array_equal(
            mirror_pixels(mirror_pixels(arr, horizontal=False), horizontal=False), arr)
        cases += 1

    for _ in range(50):  # 90-degree rotation cycle
        arr = random_rgba()
        out = arr
        for _ in range(4):
            out = rotate_quarter(out, 1)
        assert np.array_equal(out, arr)
        cases += 1

    for _ in range(40):  # opacity-0 transparency
        base = random_rgba()
        session = Session(session_id="a", width=16, height=16)
        session.paste(Patch(uniform_rgba((40, 50, 60), 16, 16)))
        before = session.flatten()
        session.paste(Patch(random_rgba()), opacity=0.0)
        assert session.flatten() == before
        cases += 1

    for _ in range(40):  # occlusion: topmost opaque canvas-filling layer wins
        colors = [tuple(int(v) for v in rng.integers(0, 256, 3)) for _ in range(3)]
        session = Session(session_id="o", width=12, height=12)
        for color in colors:
            session.paste(Patch(uniform_rgba(color, 12, 12)))
        out = session.flatten_raster()
        assert (out[:, :, :3] == np.array(colors[-1])).all()
        cases += 1

    for _ in range(30):  # flatten determinism, double run
        session = Session(session_id="d", width=16, height=16)
        session.paste(Patch(uniform_rgba(tuple(int(v) for v in rng.integers(0, 256, 3)),
                                         16, 16)))
        session.paste(Patch(random_rgba()), Placement(dx=int(rng.integers(-4, 8)),
                                                      dy=int(rng.integers(-4, 8))),
                      opacity=float(rng.uniform(0, 1)))
        assert session.flatten() == session.flatten()
        cases += 1

    # 255-over-black at opacity 0.5 rounds half-up to 128
    session = Session(session_id="half", width=8, height=8)
    session.paste(Patch(uniform_rgba((0, 0, 0), 8, 8)))
    session.paste(Patch(uniform_rgba((255, 255, 255), 8, 8)), opacity=0.5)
    out = session.flatten_raster()
    assert (out[:, :, :3] == 128).all()
    cases += 1

    assert cases >= 200, cases


@criterion("style moments: 20 random pairs within 1.0; strength 0 exact; degenerate rule")
def test_style_moment_matching():
    rng = np.random.default_rng(99)
    checked = 0
    attempts = 0
    while checked < 20 and attempts < 60:
        attempts += 1
        content = np.clip(rng.normal(rng.uniform(80, 170), rng.uniform(15, 45),
                                     (48, 48, 3)), 0, 255).astype(np.uint8)
        style = np.clip(rng.normal(rng.uniform(80, 170), rng.uniform(10, 40),
                                   (48, 48, 3)), 0, 255).astype(np.uint8)
        out = transfer_selected_style(content, style, 1.0)

        # exclude cases where clamping saturates more than 1% of pixels
        mean_c, std_c = channel_mean_std(content)
        mean_s, std_s = channel_mean_std(style)
        raw = np.empty((48, 48, 3))
        for ch in range(3):
            raw[:, :, ch] = ((content[:, :, ch].astype(float) - mean_c[ch])
                             * (std_s[ch] / std_c[ch]) + mean_s[ch])
        saturated = ((raw < 0) | (raw > 255)).mean()
        if saturated > 0.01:
            continue

        out_mean, out_std = channel_mean_std(out[:, :, :3])
        for ch in range(3):
            assert abs(out_mean[ch] - mean_s[ch]) <= 1.0
            assert abs(out_std[ch] - std_s[ch]) <= 1.0
        checked += 1
    assert checked == 20, f"only {checked} unsaturated pairs in {attempts} attempts"

    # strength 0 is the exact identity
    content = noise_rgb(rng, 32, 32)
    style = noise_rgb(rng, 32, 32)
    assert np.array_equal(
        transfer_selected_style(content, style, 0.0)[:, :, :3], content)

    # degenerate content stddev maps every pixel to the style mean
    out = transfer_selected_style(uniform_rgba((128, 128, 128), 16, 16),
                                  uniform_rgba((200, 30, 30), 16, 16), 1.0)
    assert (out[:, :, 0] == 200).all()
    assert (out[:, :, 1] == 30).all() and (out[:, :, 2] == 30).all()


@criterion("end-to-end embedded loop: hunt -> pick -> edit -> re-hunt -> credit, < 10 s")
def test_end_to_end_loop(acceptance_corpus, tmp_path):
    start = time.perf_counter()
    corpus_dir, sidecar = acceptance_corpus

    def run(tag):
        runtime = Embedded(AppConfig(
            store_root=str(tmp_path / f"store-{tag}"),
            corpus_path=str(corpus_dir),
            corpus_metadata=str(sidecar),
            session_root=str(tmp_path / f"sessions-{tag}"),
        ))
        keyword_results = runtime.hunt_keywords(("milk",), max_results=8)
        assert [r.rank for r in keyword_results] == list(range(len(keyword_results)))

        picked, credit = runtime.download(keyword_results[0].link)
        assert picked.provenance is not None and credit.startswith(picked.provenance.source_url)

        session = runtime.new_session(48, 48, "loop")
        runtime.sessions.set_background(session.session_id, picked.pixels)
        patch_id = runtime.sessions.cut(session.session_id, picked.pixels, (2, 2, 20, 20))
        runtime.sessions.paste(session.session_id,
                               runtime.sessions.get_patch(session.session_id, patch_id),
                               Placement(dx=20, dy=20, rotate=90), 0.8, patch_id=patch_id)
        collage = runtime.sessions.flatten(session.session_id)

        image_results = runtime.hunt_image_bytes(collage, max_results=8)
        assert [r.rank for r in image_results] == list(range(len(image_results)))

        final, final_credit = runtime.download(image_results[0].link)
        for asset_id in runtime.store.list_asset_ids():
            assert png_metadata_chunks(runtime.store.read_bytes(asset_id)) == []
        assert " | accessed " in final_credit

        script = tmp_path / f"sessions-{tag}" / "loop" / "script.txt"
        assert run_script(script).session.flatten() == collage
        return [r.link for r in keyword_results], [r.link for r in image_results], collage

    first = run("a")
    second = run("b")
    assert first == second  # deterministic replay of the whole loop

    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"loop took {elapsed:.1f}s"


HUNT_SCHEMA = {
    "type": "object",
    "required": ["links"],
    "additionalProperties": False,
    "properties": {"links": {"type": "array", "items": {"type": "string"}}},
}
DOWNLOAD_SCHEMA = {
    "type": "object",
    "required": ["asset_id", "credit_line"],
    "additionalProperties": False,
    "properties": {"asset_id": {"type": "string", "minLength": 1},
                   "credit_line": {"type": "string", "minLength": 1}},
}
STYLE_SCHEMA = {
    "type": "object",
    "required": ["status", "result_png_b64"],
    "additionalProperties": False,
    "properties": {"status": {"const": "ok"},
                   "result_png_b64": {"type": "string", "minLength": 1}},
}
ERROR_SCHEMA = {
    "type": "object",
    "required": ["error"],
    "additionalProperties": False,
    "properties": {"error": {"type": "string", "minLength": 1}},
}


@criterion("wire contract: POST-only ops, 200 iff success, errors as {'error': ...}")
def test_wire_contract(acceptance_corpus, tmp_path):
    corpus_dir, sidecar = acceptance_corpus
    runtime = Embedded(AppConfig(
        store_root=str(tmp_path / "wire-store"),
        corpus_path=str(corpus_dir),
        corpus_metadata=str(sidecar),
        max_upload_bytes=128 * 1024,
    ))
    client = TestClient(create_app(runtime), raise_server_exceptions=False)
    b64 = lambda data: base64.b64encode(data).decode("ascii")

    member = runtime.index.entries[0]
    member_bytes = (corpus_dir / member.asset_id).read_bytes()
    content_png = encode_png(uniform_rgba((100, 110, 120), 10, 10))

    # success paths, schema-validated
    response = client.post("/hunt/image", json={"image_png_b64": b64(member_bytes)})
    assert response.status_code == 200
    jsonschema.validate(response.json(), HUNT_SCHEMA)
    assert response.json()["links"][0] == member.link

    response = client.post("/hunt/keywords", json={"keywords": ["sea"]})
    assert response.status_code == 200
    jsonschema.validate(response.json(), HUNT_SCHEMA)

    response = client.post("/download", json={"link": member.link})
    assert response.status_code == 200
    jsonschema.validate(response.json(), DOWNLOAD_SCHEMA)

    response = client.post("/style/selected", json={
        "content_png_b64": b64(content_png), "style_png_b64": b64(content_png)})
    assert response.status_code == 200
    jsonschema.validate(response.json(), STYLE_SCHEMA)

    response = client.post("/style/existing", json={
        "content_png_b64": b64(content_png), "style_id": "ember"})
    assert response.status_code == 200
    jsonschema.validate(response.json(), STYLE_SCHEMA)

    client.post("/session/w/create", json={"width": 8, "height": 8})
    response = client.post("/session/w/flatten", json={})
    assert response.status_code == 200

    # operations are POST-only; GET is for public assets alone
    for route in ("/hunt/image", "/hunt/keywords", "/download",
                  "/style/selected", "/style/existing", "/session/w/flatten"):
        response = client.get(route)
        assert response.status_code == 405
        jsonschema.validate(response.json(), ERROR_SCHEMA)

    # every failure path yields non-200 with {"error": non-empty}
    failures = [
        client.post("/hunt/image", json={"nope": 1}),
        client.post("/hunt/image", json={"image_png_b64": "!!bad"}),
        client.post("/hunt/image", json={"image_png_b64": b64(b"x" * (200 * 1024))}),
        client.post("/hunt/keywords", json={"keywords": []}),
        client.post("/hunt/keywords", json={"keywords": ["x"], "license_filter": "nah"}),
        client.post("/download", json={"link": "file:///missing.png"}),
        client.post("/style/existing", json={"content_png_b64": b64(content_png),
                                             "style_id": "missing"}),
        client.post("/style/selected", json={"content_png_b64": b64(content_png)}),
        client.post("/session/ghost/flatten", json={}),
        client.post("/session/w/warp", json={}),
        client.get("/public/never-there.png"),
        client.post("/no/such/route", json={}),
    ]
    expected_statuses = [400, 400, 413, 400, 400, 502, 404, 400, 404, 404, 404, 404]
    for response, expected in zip(failures, expected_statuses):
        assert response.status_code == expected, response.text
        jsonschema.validate(response.json(), ERROR_SCHEMA)
