import io

import numpy as np
import pytest

from drscreen.data import (
    DataError,
    Dataset,
    LibsvmParseError,
    load_dense_features,
    parse_libsvm,
    prepare_dataset,
    serialize_libsvm,
    write_dense_csv,
)


class TestParseLibsvm:
    def test_basic_line(self):
        samples = parse_libsvm("+1 1:0.5 3:-1")
        assert samples[0].label == 1.0
        assert samples[0].values == [(1, 0.5), (3, -1.0)]

    def test_negative_label(self):
        samples = parse_libsvm("-1 2:3")
        assert samples[0].label == -1.0
        assert samples[0].values == [(2, 3.0)]

    def test_non_increasing_index(self):
        with pytest.raises(LibsvmParseError, match="non-increasing.*line 1"):
            parse_libsvm("1 3:2 2:1")

    def test_index_below_one(self):
        with pytest.raises(LibsvmParseError, match="line 2"):
            parse_libsvm("1 1:2\n1 0:1")

    def test_non_numeric(self):
        with pytest.raises(LibsvmParseError):
            parse_libsvm("1 a:2")
        with pytest.raises(LibsvmParseError):
            parse_libsvm("one 1:2")

    def test_comments_and_blanks(self):
        samples = parse_libsvm("# header\n+1 1:2 # trailing\n\n-1 1:3\n")
        assert [s.label for s in samples] == [1.0, -1.0]

    def test_roundtrip_identity(self, rng):
        samples = parse_libsvm("+1 1:0.1 2:-3.25\n-1 3:7e-3")
        again = parse_libsvm(serialize_libsvm(samples))
        assert again == samples

    def test_roundtrip_random(self, rng):
        lines = []
        for _ in range(50):
            idxs = np.sort(rng.choice(np.arange(1, 20), size=5, replace=False))
            vals = rng.standard_normal(5)
            lines.append(
                f"{rng.choice([-1, 1])} "
                + " ".join(f"{i}:{v:.17g}" for i, v in zip(idxs, vals))
            )
        samples = parse_libsvm("\n".join(lines))
        assert parse_libsvm(serialize_libsvm(samples)) == samples


class TestPrepareDataset:
    def test_intercept_appended(self):
        ds = prepare_dataset(parse_libsvm("+1 1:2 3:4\n-1 2:1"))
        assert ds.d == 4
        assert np.all(ds.x[:, -1] == 1.0)
        assert ds.x[0, 2] == 4.0 and ds.x[1, 0] == 0.0

    def test_xcheck_folding(self):
        ds = prepare_dataset(parse_libsvm("+1 1:2\n-1 1:3"))
        assert np.array_equal(ds.xcheck, [[2.0, 1.0], [-3.0, -1.0]])
        assert ds.n_pos == 1

    def test_drop_zero_features(self):
        ds = prepare_dataset(
            parse_libsvm("+1 1:1 2:5\n-1 2:6\n+1 1:2 2:7"),
            drop_zero_features=True,
        )
        # column 1 holds (1, 0, 2) and is removed; column 2 survives
        assert ds.d == 2
        assert np.array_equal(ds.x[:, 0], [5.0, 6.0, 7.0])

    def test_label_map(self):
        ds = prepare_dataset(
            parse_libsvm("0 1:1\n1 1:2"), label_map={0.0: -1.0, 1.0: 1.0}
        )
        assert np.array_equal(ds.y, [-1.0, 1.0])

    def test_unmapped_label_rejected(self):
        with pytest.raises(DataError):
            prepare_dataset(parse_libsvm("0 1:1\n1 1:2"))
        with pytest.raises(DataError):
            prepare_dataset(parse_libsvm("0 1:1"), label_map={1.0: 1.0})

    def test_empty_input(self):
        with pytest.raises(DataError):
            prepare_dataset([])

    def test_dims_override(self):
        ds = prepare_dataset(parse_libsvm("+1 1:1\n-1 1:2"), dims=3)
        assert ds.d == 4
        with pytest.raises(DataError):
            prepare_dataset(parse_libsvm("+1 5:1"), dims=3)

    def test_row_permutation_property(self, rng):
        lines = ["+1 1:1 2:3", "-1 1:4", "+1 2:2", "-1 1:1 2:1"]
        ds = prepare_dataset(parse_libsvm("\n".join(lines)))
        perm = rng.permutation(4)
        ds2 = prepare_dataset(parse_libsvm("\n".join(lines[i] for i in perm)))
        assert np.array_equal(ds2.xcheck, ds.xcheck[perm])
        assert ds2.d == ds.d


class TestDenseCsv:
    def test_small_roundtrip(self):
        text = "a,b,label\n1.5,2.5,1\n-0.5,0.25,-1\n0,1,1\n"
        ds = load_dense_features(text)
        assert ds.n == 3 and ds.d == 3
        assert np.array_equal(ds.y, [1.0, -1.0, 1.0])

    def test_header_only(self):
        with pytest.raises(DataError, match="empty dataset"):
            load_dense_features("a,b,label\n")

    def test_ragged(self):
        with pytest.raises(DataError, match="ragged"):
            load_dense_features("a,label\n1,2,3\n")

    def test_non_pm1_labels(self):
        with pytest.raises(DataError):
            load_dense_features("a,label\n1,2\n")

    def test_bitwise_roundtrip(self, rng):
        feats = rng.standard_normal((7, 3)) * np.pi
        y = np.where(rng.uniform(size=7) < 0.5, 1.0, -1.0)
        ds = Dataset.from_features(feats, y)
        buf = io.StringIO()
        write_dense_csv(ds, buf)
        ds2 = load_dense_features(buf.getvalue())
        assert np.array_equal(ds2.xcheck, ds.xcheck)


class TestDataset:
    def test_rejects_bad_labels(self):
        with pytest.raises(DataError):
            Dataset.from_features(np.ones((2, 1)), np.array([1.0, 2.0]))

    def test_rejects_missing_intercept(self):
        with pytest.raises(DataError):
            Dataset(x=np.array([[1.0, 2.0]]), y=np.array([1.0]))

    def test_rejects_nonfinite(self):
        with pytest.raises(DataError):
            Dataset.from_features(np.array([[np.nan]]), np.array([1.0]))
