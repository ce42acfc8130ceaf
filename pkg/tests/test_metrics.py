import numpy as np
import pytest

from facesign import EmptyDataset, confusion_matrix, report_from_confusion
from facesign.metrics import format_percent, format_report_table


def oracle_metrics(cm):
    """Independent direct-definition evaluation (plain Python arithmetic)."""
    k = len(cm)
    n = sum(sum(row) for row in cm)
    rows = [sum(cm[i][j] for j in range(k)) for i in range(k)]
    cols = [sum(cm[i][j] for i in range(k)) for j in range(k)]
    per = []
    for c in range(k):
        tp = cm[c][c]
        p = tp / cols[c] if cols[c] else 0.0
        r = tp / rows[c] if rows[c] else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        per.append((p, r, f))
    acc = sum(cm[c][c] for c in range(k)) / n
    w_p = sum(rows[c] * per[c][0] for c in range(k)) / n
    w_r = sum(rows[c] * per[c][1] for c in range(k)) / n
    w_f = sum(rows[c] * per[c][2] for c in range(k)) / n
    return acc, per, (w_p, w_r, w_f)


def test_table_one_anchor_matrix():
    # trace 73 over n=76, the headline arithmetic
    cm = np.array([[25, 1, 0], [1, 24, 1], [0, 0, 24]])
    report = report_from_confusion(cm)
    assert report.n == 76
    assert int(np.trace(report.confusion)) == 73
    assert report.accuracy == 73 / 76
    assert format_percent(report.accuracy) == "96.05"
    assert report.weighted.recall == report.accuracy


def test_perfect_diagonal():
    report = report_from_confusion(np.diag([10, 20, 30]))
    assert report.accuracy == 1.0
    for c in report.per_class:
        assert c.precision == c.recall == c.f1 == 1.0
    assert report.weighted.precision == report.weighted.recall == report.weighted.f1 == 1.0
    assert format_percent(report.accuracy) == "100.00"


def test_half_accuracy_example():
    report = report_from_confusion(np.array([[2, 0, 0], [0, 0, 1], [0, 1, 0]]))
    assert report.accuracy == 0.5
    assert report.per_class[0].precision == 1.0
    assert report.per_class[0].recall == 1.0
    assert report.per_class[0].f1 == 1.0
    for c in (1, 2):
        assert report.per_class[c].precision == 0.0
        assert report.per_class[c].recall == 0.0
        assert report.per_class[c].f1 == 0.0
    assert report.weighted.recall == 0.5 == report.accuracy


def random_matrices(count, seed, allow_zero_rows=True):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        cm = rng.integers(0, 40, size=(3, 3))
        if allow_zero_rows and rng.random() < 0.15:
            cm[int(rng.integers(0, 3))] = 0
        if cm.sum() == 0:
            cm[0, 0] = 1
        yield cm


def test_oracle_agreement_1000_random_matrices():
    for cm in random_matrices(1000, seed=101):
        report = report_from_confusion(cm)
        acc, per, weighted = oracle_metrics(cm.tolist())
        assert abs(report.accuracy - acc) < 1e-12
        for c in range(3):
            assert abs(report.per_class[c].precision - per[c][0]) < 1e-12
            assert abs(report.per_class[c].recall - per[c][1]) < 1e-12
            assert abs(report.per_class[c].f1 - per[c][2]) < 1e-12
        assert abs(report.weighted.precision - weighted[0]) < 1e-12
        assert abs(report.weighted.recall - weighted[1]) < 1e-12
        assert abs(report.weighted.f1 - weighted[2]) < 1e-12


def test_weighted_recall_equals_accuracy_exactly_1000():
    for cm in random_matrices(1000, seed=202):
        report = report_from_confusion(cm)
        assert report.weighted.recall == report.accuracy  # exact, not approx


def test_rate_ranges_and_f1_envelope():
    for cm in random_matrices(500, seed=303):
        report = report_from_confusion(cm)
        values = [report.accuracy]
        for c in report.per_class:
            values += [c.precision, c.recall, c.f1]
            if c.precision > 0 and c.recall > 0:
                assert min(c.precision, c.recall) <= c.f1 <= max(c.precision, c.recall)
        values += [report.weighted.precision, report.weighted.recall, report.weighted.f1]
        assert all(0.0 <= v <= 1.0 for v in values)


def test_confusion_conservation():
    rng = np.random.default_rng(404)
    for _ in range(100):
        n = int(rng.integers(1, 200))
        y_true = rng.integers(0, 3, size=n)
        y_pred = rng.integers(0, 3, size=n)
        cm = confusion_matrix(y_true, y_pred)
        assert cm.sum() == n
        for c in range(3):
            assert cm[c].sum() == int((y_true == c).sum())
            assert cm[:, c].sum() == int((y_pred == c).sum())


def test_zero_division_flags():
    report = report_from_confusion(np.array([[5, 0, 0], [0, 0, 0], [0, 0, 5]]))
    assert "recall[1]" in report.zero_division
    assert "precision[1]" in report.zero_division
    assert "f1[1]" in report.zero_division
    clean = report_from_confusion(np.diag([1, 1, 1]))
    assert clean.zero_division == ()


def test_macro_property():
    cm = np.array([[8, 1, 1], [0, 9, 1], [2, 0, 8]])
    report = report_from_confusion(cm)
    macro = report.macro
    assert abs(macro.precision - np.mean([c.precision for c in report.per_class])) < 1e-15
    assert abs(macro.recall - np.mean([c.recall for c in report.per_class])) < 1e-15


def test_empty_matrix_rejected():
    with pytest.raises(EmptyDataset):
        report_from_confusion(np.zeros((3, 3), dtype=int))


def test_negative_entries_rejected():
    with pytest.raises(ValueError):
        report_from_confusion(np.array([[1, -1, 0], [0, 1, 0], [0, 0, 1]]))


def test_format_percent_half_up():
    assert format_percent(0.96055) == "96.06"  # binary value sits just above 96.055
    assert format_percent(0.5) == "50.00"
    assert format_percent(73 / 76) == "96.05"
    assert format_percent(0.880625) == "88.06"  # binary value sits just below 88.0625
    assert format_percent(1.0) == "100.00"
    assert format_percent(0.0) == "0.00"


def test_report_json_field_names():
    report = report_from_confusion(np.diag([2, 2, 2]))
    doc = report.to_json_dict()
    assert set(doc) == {"confusion", "accuracy", "per_class", "weighted", "n", "zero_division"}
    assert doc["n"] == 6
    assert doc["confusion"] == [[2, 0, 0], [0, 2, 0], [0, 0, 2]]
    assert set(doc["weighted"]) == {"precision", "recall", "f1"}
    assert all(set(c) == {"precision", "recall", "f1"} for c in doc["per_class"])


def test_table_rendering():
    cm = np.array([[25, 1, 0], [1, 24, 1], [0, 0, 24]])
    table = format_report_table(report_from_confusion(cm))
    assert "96.05" in table
    assert "Accuracy" in table and "F1 Score" in table
    assert "n = 76" in table
