"""Full search-edit loop in embedded mode: no server, no network."""

import numpy as np
import pytest

from imagehunt.compositor import Placement
from imagehunt.config import AppConfig
from imagehunt.editscript import run_script
from imagehunt.embedded import Embedded

from oracles import png_metadata_chunks


@pytest.fixture()
def runtime(corpus, tmp_path):
    corpus_dir, sidecar = corpus
    config = AppConfig(
        store_root=str(tmp_path / "store"),
        corpus_path=str(corpus_dir),
        corpus_metadata=str(sidecar),
        session_root=str(tmp_path / "sessions"),
    )
    return Embedded(config)


def drive_loop(runtime):
    """keyword hunt -> pick -> cut -> paste -> image hunt -> download -> credit."""
    keyword_results = runtime.hunt_keywords(("milk",), max_results=10)
    assert keyword_results
    assert [r.rank for r in keyword_results] == list(range(len(keyword_results)))

    picked, credit = runtime.download(keyword_results[0].link)
    assert picked.provenance is not None
    assert picked.provenance.source_url == keyword_results[0].link
    assert credit.startswith(keyword_results[0].link)

    session = runtime.new_session(48, 48, "loop")
    runtime.sessions.set_background(session.session_id, picked.pixels)
    patch_id = runtime.sessions.cut(session.session_id, picked.pixels, (4, 4, 24, 24))
    patch = runtime.sessions.get_patch(session.session_id, patch_id)
    runtime.sessions.paste(session.session_id, patch,
                           Placement(dx=16, dy=16, mirror_h=True), 0.85,
                           patch_id=patch_id)
    collage_png = runtime.sessions.flatten(session.session_id)

    image_results = runtime.hunt_image_bytes(collage_png, max_results=10)
    assert image_results
    assert [r.rank for r in image_results] == list(range(len(image_results)))

    final, final_credit = runtime.download(image_results[0].link)
    assert final.provenance is not None
    assert " | accessed " in final_credit
    return keyword_results, image_results, collage_png, final_credit


def test_loop_clean_storage_and_credits(runtime):
    keyword_results, image_results, collage_png, final_credit = drive_loop(runtime)
    # every stored asset is metadata-free
    for asset_id in runtime.store.list_asset_ids():
        assert png_metadata_chunks(runtime.store.read_bytes(asset_id)) == []
    assert final_credit.endswith("filter=not-filtered-by-license")


def test_loop_is_deterministic_across_runs(corpus, tmp_path):
    corpus_dir, sidecar = corpus

    def run(tag):
        config = AppConfig(
            store_root=str(tmp_path / f"store-{tag}"),
            corpus_path=str(corpus_dir),
            corpus_metadata=str(sidecar),
            session_root=str(tmp_path / f"sessions-{tag}"),
        )
        runtime = Embedded(config)
        keyword_results, image_results, collage_png, _ = drive_loop(runtime)
        return ([r.link for r in keyword_results],
                [r.link for r in image_results],
                collage_png,
                tmp_path / f"sessions-{tag}" / "loop" / "script.txt")

    links_a, image_a, collage_a, script_a = run("a")
    links_b, image_b, collage_b, script_b = run("b")
    assert links_a == links_b
    assert image_a == image_b
    assert collage_a == collage_b

    # the persisted session script replays to the same collage bytes
    replayed = run_script(script_a)
    assert replayed.session.flatten() == collage_a


def test_query_image_published_for_engine_access(runtime):
    _, _, collage_png, _ = drive_loop(runtime)
    # the collage was ingested and published under the store's public base
    ids = runtime.store.list_asset_ids()
    published = [runtime.store.publish(i) for i in ids]
    assert all(u.startswith("http://127.0.0.1:8000/public/") for u in published)
    # and its stored bytes are exactly servable
    for asset_id in ids:
        assert runtime.store.read_bytes(asset_id)
