from unittest.mock import Mock, call, patch, sentinel

import numpy as np
import pytest

import sdt.utils


@pytest.fixture
def patch_path():
    return "sdt.utils"


def test_derive_seed_deterministic():
    assert sdt.utils.derive_seed(7, 2, 3) == sdt.utils.derive_seed(7, 2, 3)


def test_derive_seed_depends_on_every_key():
    seeds = {
        sdt.utils.derive_seed(7, 2, 3),
        sdt.utils.derive_seed(7, 2, 4),
        sdt.utils.derive_seed(7, 3, 3),
        sdt.utils.derive_seed(8, 2, 3),
    }
    assert len(seeds) == 4
    assert all(0 <= seed < 2 ** 63 for seed in seeds)


def test_rng_for_reproducible():
    first = sdt.utils.rng_for(1, 2).standard_normal(5)
    second = sdt.utils.rng_for(1, 2).standard_normal(5)
    other = sdt.utils.rng_for(1, 3).standard_normal(5)

    np.testing.assert_array_equal(first, second)
    assert not np.array_equal(first, other)


def test_parallel_map_serial_does_not_start_threads(patch_path):
    function = Mock(side_effect=lambda item: item * 2)

    with patch(f"{patch_path}.futures.ThreadPoolExecutor") as mock_executor:
        result = sdt.utils.parallel_map(function, [1, 2, 3], workers=1)

        mock_executor.assert_not_called()
    assert result == [2, 4, 6]
    assert function.mock_calls == [call(1), call(2), call(3)]


def test_parallel_map_threads(patch_path):
    with patch(f"{patch_path}.futures.ThreadPoolExecutor") as mock_executor:
        executor = mock_executor.return_value.__enter__.return_value
        executor.map.return_value = iter([sentinel.first, sentinel.second])

        result = sdt.utils.parallel_map(sentinel.function, sentinel.items, workers=3)

        mock_executor.assert_called_once_with(max_workers=3)
        executor.map.assert_called_once_with(sentinel.function, sentinel.items)
    assert result == [sentinel.first, sentinel.second]


def test_parallel_map_preserves_order():
    items = list(range(50))
    assert sdt.utils.parallel_map(lambda item: item ** 2, items, workers=4) == [
        item ** 2 for item in items
    ]


def test_atomic_path_replaces_on_success(tmp_path):
    target = tmp_path / "out.csv"
    target.write_text("old")

    with sdt.utils.atomic_path(target) as temp_path:
        assert temp_path.parent == tmp_path
        temp_path.write_text("new")
        assert target.read_text() == "old"

    assert target.read_text() == "new"
    assert list(tmp_path.iterdir()) == [target]


def test_atomic_path_keeps_target_on_failure(tmp_path):
    target = tmp_path / "out.csv"
    target.write_text("old")

    with pytest.raises(RuntimeError):
        with sdt.utils.atomic_path(target) as temp_path:
            temp_path.write_text("partial")
            raise RuntimeError("interrupted")

    assert target.read_text() == "old"
    assert list(tmp_path.iterdir()) == [target]


def test_geometric_grid():
    grid = sdt.utils.geometric_grid(0.01, 1.0, 3)
    np.testing.assert_allclose(grid, [0.01, 0.1, 1.0])


def test_first_argmax_tie_goes_to_first():
    assert sdt.utils.first_argmax([0.0, 2.0, 1.0, 2.0]) == 1
