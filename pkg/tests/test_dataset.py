import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdenoise.dataset import (
    DatasetGenerator,
    QDSFormatError,
    cell_table,
    channels_to_dm,
    dm_to_channels,
    encode_qds,
    read_qds,
    record_size,
    split_train_test,
    stratified_split,
    write_qds,
)
from qdenoise.dataset.qds import HEADER, manifest_path
from qdenoise.noise import NoiseKind
from qdenoise.quantum import DensityMatrix

from .conftest import LEVELS, random_density_matrix


def test_generation_is_balanced(small_dataset):
    counts = small_dataset.cell_counts()
    assert len(counts) == 20
    assert set(counts.values()) == {2}
    assert cell_table(small_dataset)["bitflip@0.05"] == 2


def test_twenty_samples_fill_each_cell_once():
    dataset = DatasetGenerator(3, 2, 3, list(NoiseKind), LEVELS, global_seed=0).generate(20)
    assert set(dataset.cell_counts().values()) == {1}


def test_uneven_counts_differ_by_at_most_one():
    dataset = DatasetGenerator(2, 1, 2, list(NoiseKind), LEVELS, global_seed=0).generate(27)
    counts = list(dataset.cell_counts().values())
    assert max(counts) - min(counts) <= 1


def test_samples_are_valid_states(small_dataset):
    for record in small_dataset.records:
        assert record.clean.is_valid()
        assert record.noisy.is_valid()


def test_generator_rejects_empty_inputs():
    with pytest.raises(ValueError):
        DatasetGenerator(3, 2, 3, [], LEVELS, global_seed=0)
    with pytest.raises(ValueError):
        DatasetGenerator(3, 2, 3, list(NoiseKind), [], global_seed=0)


def test_output_independent_of_thread_count():
    args = (3, 2, 5, list(NoiseKind), LEVELS, 17)
    single = DatasetGenerator(*args, threads=1).generate(24)
    pooled = DatasetGenerator(*args, threads=4).generate(24)
    assert encode_qds(single) == encode_qds(pooled)


def test_regeneration_is_byte_identical(tmp_path):
    args = (3, 2, 4, list(NoiseKind), LEVELS, 42)
    write_qds(DatasetGenerator(*args).generate(20), tmp_path / "a.qds")
    write_qds(DatasetGenerator(*args).generate(20), tmp_path / "b.qds")
    assert (tmp_path / "a.qds").read_bytes() == (tmp_path / "b.qds").read_bytes()


def test_round_trip_is_bit_exact(small_dataset, tmp_path):
    path = tmp_path / "data.qds"
    write_qds(small_dataset, path)
    back = read_qds(path)
    assert back.manifest == small_dataset.manifest
    for a, b in zip(back.records, small_dataset.records):
        np.testing.assert_array_equal(a.clean.mat, b.clean.mat)
        np.testing.assert_array_equal(a.noisy.mat, b.noisy.mat)
        assert (a.noise_kind, a.noise_level, a.sample_seed) == (b.noise_kind, b.noise_level, b.sample_seed)
    assert not list(tmp_path.glob("*.partial"))


def test_file_layout(small_dataset, tmp_path):
    path = tmp_path / "data.qds"
    write_qds(small_dataset, path)
    data = path.read_bytes()
    assert data[:4] == b"QDS1"
    assert len(data) == HEADER.size + 40 * record_size(8)
    assert record_size(8) == 24 + 2 * 64 * 16
    manifest = json.loads(manifest_path(path).read_text())
    for key in ("num_qubits", "dim", "num_samples", "levels", "kinds", "global_seed", "version"):
        assert key in manifest


def test_bad_magic(small_dataset, tmp_path):
    path = tmp_path / "data.qds"
    write_qds(small_dataset, path)
    data = bytearray(path.read_bytes())
    data[2] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(QDSFormatError, match="bad magic") as info:
        read_qds(path)
    assert info.value.offset == 0


def test_truncated_last_record(small_dataset, tmp_path):
    path = tmp_path / "data.qds"
    write_qds(small_dataset, path)
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(QDSFormatError) as info:
        read_qds(path)
    assert info.value.record_index == 39
    assert info.value.offset == HEADER.size + 39 * record_size(8)


def test_corrupt_state_fails_validation(small_dataset, tmp_path):
    path = tmp_path / "data.qds"
    write_qds(small_dataset, path)
    data = bytearray(path.read_bytes())
    # first real part of the first clean state
    offset = HEADER.size + 24
    data[offset:offset + 8] = np.float64(5.0).tobytes()
    path.write_bytes(bytes(data))
    with pytest.raises(QDSFormatError, match="invalid clean state") as info:
        read_qds(path)
    assert info.value.record_index == 0
    assert len(read_qds(path, validate=False)) == 40


def test_split_sizes_and_disjointness(small_dataset):
    train, test = split_train_test(small_dataset, 0.2, split_seed=3)
    assert len(train) == 32 and len(test) == 8
    assert not set(train) & set(test)
    assert sorted(train + test) == list(range(40))


def test_split_of_twenty_samples():
    dataset = DatasetGenerator(2, 1, 2, list(NoiseKind), LEVELS, global_seed=1).generate(20)
    train, test = split_train_test(dataset, 0.2, split_seed=0)
    assert (len(train), len(test)) == (16, 4)


def test_split_half_of_two():
    train, test = stratified_split(["a", "a"], 0.5, seed=0)
    assert (len(train), len(test)) == (1, 1)


def test_split_is_deterministic_and_seeded():
    keys = [i % 4 for i in range(100)]
    assert stratified_split(keys, 0.2, 7) == stratified_split(keys, 0.2, 7)
    assert stratified_split(keys, 0.2, 7) != stratified_split(keys, 0.2, 8)


def test_split_rejects_empty_sides():
    with pytest.raises(ValueError):
        stratified_split(["a", "b"], 0.1, seed=0)
    with pytest.raises(ValueError):
        stratified_split(["a"] * 10, 1.0, seed=0)


@settings(max_examples=40, deadline=None)
@given(
    sizes=st.lists(st.integers(1, 30), min_size=1, max_size=8),
    fraction=st.floats(0.1, 0.5),
    seed=st.integers(0, 2**32 - 1),
)
def test_split_stratification_property(sizes, fraction, seed):
    keys = [k for k, size in enumerate(sizes) for _ in range(size)]
    n_held = int(np.floor(len(keys) * fraction + 0.5))
    if n_held in (0, len(keys)):
        return
    kept, held = stratified_split(keys, fraction, seed)
    assert len(held) == n_held
    assert sorted(kept + held) == list(range(len(keys)))
    for k, size in enumerate(sizes):
        share = sum(1 for i in held if keys[i] == k)
        assert abs(share - size * fraction) <= 1


def test_channels_of_zero_state():
    t = dm_to_channels(DensityMatrix.zero_state(2))
    assert t.shape == (4, 4, 2)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    np.testing.assert_array_equal(t[..., 0], expected)
    np.testing.assert_array_equal(t[..., 1], 0.0)


def test_channels_of_plus_state():
    t = dm_to_channels(DensityMatrix(1, np.full((2, 2), 0.5)))
    np.testing.assert_array_equal(t[..., 0], 0.5)
    np.testing.assert_array_equal(t[..., 1], 0.0)


def test_channels_round_trip():
    rho = random_density_matrix(np.random.default_rng(0), 8)
    np.testing.assert_array_equal(channels_to_dm(dm_to_channels(DensityMatrix(3, rho))), rho)


def test_channels_to_dm_rejects_bad_shape():
    with pytest.raises(ValueError):
        channels_to_dm(np.zeros((4, 4, 3)))


def test_dataset_channels_batch(small_dataset):
    noisy = small_dataset.channels([0, 5], "noisy")
    assert noisy.shape == (2, 8, 8, 2)
    np.testing.assert_array_equal(noisy[1], dm_to_channels(small_dataset.records[5].noisy))
    with pytest.raises(ValueError):
        small_dataset.channels([0], "both")
