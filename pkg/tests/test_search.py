import itertools
import json
import random

import pytest

from tileupb.builtins import tile_structure
from tileupb.search import (
    CheckpointError,
    SearchConfig,
    canonical_form,
    enumerate_partitions,
    has_rectangle_subunion,
    incremental_prune,
    search,
)
from tileupb.tiles import TileStructure, utile_check, utile_check_all, validate

from helpers import validate_schema


def brute_force(dims, min_tiles=5):
    """Every partition, filtered by the rectangle condition, up to symmetry."""
    keys = set()
    for ts in enumerate_partitions(dims):
        if ts.s >= min_tiles and all(utile_check_all(ts).values()):
            keys.add(canonical_form(ts))
    return keys


def keys_of(result):
    return {canonical_form(ts) for ts in result.found}


def relabel(ts, perm, sigma):
    """Apply a party permutation and per-party relabelings."""
    tiles = []
    for t in ts.tiles:
        subsets = [sorted(sigma[j][v] for v in t.subsets[j]) for j in range(len(ts.dims))]
        tiles.append([subsets[perm[j]] for j in range(len(ts.dims))])
    return TileStructure.from_subsets([ts.dims[perm[j]] for j in range(len(ts.dims))], tiles)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 4), (2, 6), (2, 2, 2), (2, 2, 3)])
def test_small_grids_are_empty(dims):
    r = search(SearchConfig(dims))
    assert r.found == [] and r.complete


def test_three_by_three_finds_the_tiles():
    r = search(SearchConfig((3, 3)))
    assert keys_of(r) == {canonical_form(tile_structure("tiles-3x3"))}


def test_three_by_four():
    r = search(SearchConfig((3, 4)))
    assert len(r.found) == 3
    # the six-tile example has a two-tile rectangle, so it is not among them
    fig = tile_structure("fig1-3x4")
    assert has_rectangle_subunion(fig)
    assert canonical_form(fig) not in keys_of(r)


def test_three_cubed_is_empty():
    r = search(SearchConfig((3, 3, 3)))
    assert r.found == [] and r.complete and r.nodes > 0


@pytest.mark.parametrize("dims", [(3, 3), (3, 4), (2, 2, 2)])
def test_matches_brute_force(dims):
    assert keys_of(search(SearchConfig(dims))) == brute_force(dims)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 2, 2), (3, 3)])
def test_unfiltered_search_is_complete(dims):
    cfg = SearchConfig(dims, min_tiles=2, condition=False)
    everything = {canonical_form(ts) for ts in enumerate_partitions(dims) if ts.s >= 2}
    assert keys_of(search(cfg)) == everything


@pytest.mark.parametrize("dims", [(3, 3), (3, 4), (2, 2, 2)])
def test_pruning_does_not_change_results(dims):
    a = search(SearchConfig(dims))
    b = search(SearchConfig(dims, prune=False))
    assert keys_of(a) == keys_of(b)
    assert a.nodes <= b.nodes


@pytest.mark.parametrize("dims", [(3, 3), (3, 4)])
def test_symmetry_reduction_loses_nothing(dims):
    full = search(SearchConfig(dims, symmetry_reduction=False))
    reduced = search(SearchConfig(dims))
    assert {canonical_form(ts) for ts in full.found} == keys_of(reduced)
    assert len(full.found) > len(reduced.found)


def test_workers_do_not_change_the_outcome():
    a = search(SearchConfig((3, 4)))
    b = search(SearchConfig((3, 4), workers=2))
    assert keys_of(a) == keys_of(b)
    assert (a.nodes, a.prunes) == (b.nodes, b.prunes)


def test_checkpoint_resume(tmp_path):
    path = str(tmp_path / "ck.json")
    full = search(SearchConfig((3, 4)))
    part = search(SearchConfig((3, 4), checkpoint=path, max_tasks=3))
    assert not part.complete
    data = json.loads(open(path).read())
    assert len(data["completed"]) == 3
    resumed = search(SearchConfig((3, 4), checkpoint=path))
    assert resumed.complete
    assert keys_of(resumed) == keys_of(full)
    assert resumed.nodes == full.nodes


def test_checkpoint_mismatch(tmp_path):
    path = str(tmp_path / "ck.json")
    search(SearchConfig((3, 3), checkpoint=path, max_tasks=1))
    with pytest.raises(CheckpointError):
        search(SearchConfig((3, 3), min_tiles=6, checkpoint=path))


def test_checkpoint_corrupt(tmp_path):
    path = tmp_path / "ck.json"
    path.write_text("{\"version\": ")
    with pytest.raises(CheckpointError):
        search(SearchConfig((3, 3), checkpoint=str(path)))


def test_config_validation():
    for bad in [dict(dims=(3,)), dict(dims=(3, 0)), dict(dims=(3, 3), min_tiles=1),
                dict(dims=(3, 3), max_tiles=25), dict(dims=(3, 3), min_tiles=9, max_tiles=8)]:
        with pytest.raises(ValueError):
            SearchConfig(**bad)


def test_canonical_form_golden():
    assert canonical_form(tile_structure("fig1-3x4")) == (
        (3, 4), ((1, 1), (1, 6), (2, 3), (3, 8), (4, 11), (6, 4)))


def test_canonical_form_invariance():
    rng = random.Random(3)
    for name in ("fig1-3x4", "upb-333", "tiles-3x3"):
        ts = tile_structure(name)
        key = canonical_form(ts)
        n = len(ts.dims)
        for _ in range(8):
            perm = list(range(n))
            if len(set(ts.dims)) == 1:
                rng.shuffle(perm)
            sigma = [rng.sample(range(d), d) for d in ts.dims]
            assert canonical_form(relabel(ts, perm, sigma)) == key
        # idempotent: the key's own structure has the same key
        dims, masks = key
        tiles = [[[v for v in range(d) if m >> v & 1] for d, m in zip(dims, t)] for t in masks]
        assert canonical_form(TileStructure.from_subsets(dims, tiles)) == key


def test_canonical_form_separates_layouts():
    parts = enumerate_partitions((3, 3))
    keys = {canonical_form(ts) for ts in parts}
    # layouts with different tile-size profiles never share a key
    for a, b in itertools.combinations(parts[:60], 2):
        if sorted(t.size for t in a.tiles) != sorted(t.size for t in b.tiles):
            assert canonical_form(a) != canonical_form(b)
    # 37 layouts with two or more tiles, plus the whole grid
    assert len(keys) == 38


def test_incremental_prune_examples():
    fig = tile_structure("fig1-3x4")
    t = fig.tiles
    # the first two tiles together fill a row segment {0} x {0,1,2}
    assert incremental_prune([t[0]], t[1], fig.dims)
    assert not incremental_prune([], t[0], fig.dims)
    tiles = tile_structure("tiles-3x3")
    for k in range(tiles.s):
        rest = [x for j, x in enumerate(tiles.tiles) if j != k]
        assert not incremental_prune(rest[:-1], rest[-1], tiles.dims)


def test_subunion_routes_agree():
    rng = random.Random(11)
    parts = enumerate_partitions((3, 3)) + enumerate_partitions((2, 2, 2))
    parts = [ts for ts in parts if ts.s >= 5]
    for ts in rng.sample(parts, 80):
        assert has_rectangle_subunion(ts) == (not all(utile_check_all(ts).values()))


def test_found_structures_pass_independent_checks():
    for ts in search(SearchConfig((3, 4))).found:
        assert validate(ts).ok
        assert all(utile_check(ts, bp) for bp in utile_check_all(ts))
        assert not has_rectangle_subunion(ts)


def test_result_json_matches_schema():
    validate_schema(search(SearchConfig((3, 3))).to_json(), "search_result")
