import itertools

import numpy as np
import pytest

from fieldsense.evaluate import (
    generate_cases,
    make_algorithm,
    mann_whitney_u,
    mrr,
    pcr,
    reciprocal_rank,
    run_benchmark,
    split_by_time,
)
from fieldsense.schema import Dataset, FieldSchema, FormSchema, InputInstance


class TestSplit:
    def test_seven_rows_split_six_one(self, bank_dataset7):
        train, test = split_by_time(bank_dataset7, ratio=0.8)
        assert len(train.instances) == 6
        assert len(test.instances) == 1
        assert test.instances[0].values["name"] == "Gibson"
        assert test.instances[0].submitted_at == 20180102132533

    def test_ratio_one_rejected(self, bank_dataset7):
        with pytest.raises(ValueError, match="no test instances"):
            split_by_time(bank_dataset7, ratio=1.0)

    def test_ten_rows_ratio_point_eight(self, bank_schema):
        instances = [
            InputInstance(values={"name": f"p{i}"}, submitted_at=1000 + i)
            for i in range(10)
        ]
        ds = Dataset(schema=bank_schema, instances=instances)
        train, test = split_by_time(ds, ratio=0.8)
        assert len(train.instances) == 8 and len(test.instances) == 2
        assert train.instances[-1].submitted_at < test.instances[0].submitted_at

    def test_too_small_dataset_rejected(self, bank_schema):
        ds = Dataset(schema=bank_schema,
                     instances=[InputInstance(values={}, submitted_at=1)])
        with pytest.raises(ValueError, match="at least 2"):
            split_by_time(ds)


class TestGenerateCases:
    def test_sequential_fills_everything_before_target(self, bank_dataset7):
        _, test = split_by_time(bank_dataset7, ratio=0.8)
        cases = generate_cases(test, "sequential",
                               targets=["entity", "primary activity"])
        by_target = {c.target: c for c in cases}
        st2 = by_target["primary activity"]
        assert st2.filled == {"name": "Gibson", "income": "20",
                              "entity": "Private", "company type": "Leasing"}
        assert st2.ground_truth == "Leasing Service"
        st1 = by_target["entity"]
        assert st1.filled == {"name": "Gibson", "income": "20"}
        assert st1.ground_truth == "Private"

    def test_random_respects_permutation_prefix(self, bank_dataset7):
        _, test = split_by_time(bank_dataset7, ratio=0.8)
        cases = generate_cases(test, "random", seed=7,
                               targets=["entity", "primary activity"])
        # oracle: rebuild the permutation the same seeded way
        tab_order = [f.name for f in test.schema.fields_by_tab()]
        rng = np.random.default_rng([7, 0])
        order = [tab_order[i] for i in rng.permutation(len(tab_order))]
        for case in cases:
            cut = order.index(case.target)
            expected = {
                name: test.instances[0].values[name]
                for name in order[:cut]
                if test.instances[0].values[name] is not None
            }
            assert case.filled == expected

    def test_random_is_deterministic(self, bank_dataset7):
        _, test = split_by_time(bank_dataset7, ratio=0.8)
        a = generate_cases(test, "random", seed=3, targets=["entity"])
        b = generate_cases(test, "random", seed=3, targets=["entity"])
        assert a == b

    def test_empty_ground_truth_emits_no_case(self, bank_schema):
        inst = InputInstance(
            values={"name": "X", "income": "5", "entity": None,
                    "company type": "Leasing", "primary activity": None},
            submitted_at=1,
        )
        ds = Dataset(schema=bank_schema, instances=[inst])
        cases = generate_cases(ds, "sequential",
                               targets=["entity", "primary activity"])
        assert cases == []

    def test_default_targets_require_enough_candidates(self, bank_dataset7):
        _, test = split_by_time(bank_dataset7, ratio=0.8)
        # entity has 2 candidates, primary activity 5: none reach 10
        assert generate_cases(test, "sequential") == []
        cases = generate_cases(test, "sequential", min_candidates=3)
        assert {c.target for c in cases} == {"primary activity"}

    def test_non_categorical_target_rejected(self, bank_dataset7):
        _, test = split_by_time(bank_dataset7, ratio=0.8)
        with pytest.raises(ValueError, match="not categorical"):
            generate_cases(test, "sequential", targets=["income"])


class TestMetrics:
    def test_mrr_hand_fixture(self):
        ranks = [reciprocal_rank(["t", "x"], "t"),
                 reciprocal_rank(["x", "t"], "t"),
                 reciprocal_rank(["a", "b", "c", "t"], "t"),
                 reciprocal_rank(["a", "b"], "t")]
        assert ranks == [1.0, 0.5, 0.25, 0.0]
        assert mrr(ranks) == pytest.approx(0.4375)

    def test_mrr_single_top_hit(self):
        assert mrr([reciprocal_rank(["t"], "t")]) == 1.0

    def test_mrr_absent_counts_zero(self):
        assert reciprocal_rank(["a", "b"], "t") == 0.0

    def test_mrr_undefined_without_suggestions(self):
        assert mrr([]) is None

    def test_pcr_values(self):
        assert pcr(7, 10) == pytest.approx(0.7)
        assert pcr(0, 5) == 0.0
        assert pcr(5, 5) == 1.0

    def test_pcr_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            pcr(1, 0)
        with pytest.raises(ValueError):
            pcr(3, 2)


class TestMannWhitney:
    def test_identical_samples(self):
        u, p = mann_whitney_u([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        assert u == pytest.approx(4.5)  # at its mean n1*n2/2
        assert p == pytest.approx(1.0)

    def test_maximal_separation_matches_enumeration_oracle(self):
        a, b = [1.0, 1.0, 1.0], [0.0, 0.0, 0.0]
        u, p = mann_whitney_u(a, b)
        # oracle: enumerate all 20 assignments of the pooled values to the
        # two groups and recompute U as greater/tie pair counts
        pooled = a + b
        us = []
        for positions in itertools.combinations(range(6), 3):
            grp_a = [pooled[i] for i in positions]
            grp_b = [pooled[i] for i in range(6) if i not in positions]
            u_direct = sum(
                1.0 if x > y else 0.5 if x == y else 0.0
                for x in grp_a for y in grp_b
            )
            us.append(u_direct)
        assert len(us) == 20
        assert u == max(us) == 9.0
        assert sum(us) / len(us) == pytest.approx(4.5)
        assert p < 0.05

    def test_hand_ranked_textbook_pair(self):
        # pooled ranks: 10->1, 11->2, 12->3, 14->4, 15->5, 18->6, 20->7, 22->8
        # R_a = 3+5+6+8 = 22, U = 22 - 4*5/2 = 12
        u, p = mann_whitney_u([12, 15, 18, 22], [10, 11, 14, 20])
        assert u == 12.0
        assert 0.0 < p <= 1.0

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0])


def small_benchmark_dataset():
    """60 instances, one field pair with a deterministic dependency and a
    12-value target so the default eligibility filter keeps it."""
    values = [f"v{i:02d}" for i in range(12)]
    schema = FormSchema(name="bench", fields=(
        FieldSchema(name="driver", kind="categorical",
                    candidates=tuple(f"d{i}" for i in range(12)), tab_index=0),
        FieldSchema(name="outcome", kind="categorical", candidates=tuple(values),
                    tab_index=1),
    ))
    rng = np.random.default_rng(0)
    instances = []
    for i in range(60):
        d = int(rng.integers(0, 12))
        outcome = values[d] if rng.random() < 0.9 else values[int(rng.integers(0, 12))]
        instances.append(InputInstance(
            values={"driver": f"d{d}", "outcome": outcome},
            submitted_at=1000 + i,
        ))
    return Dataset(schema=schema, instances=instances)


class TestRunBenchmark:
    def test_frequency_baseline_answers_everything(self):
        ds = small_benchmark_dataset()
        result = run_benchmark(ds, ["mfm"], scenario="sequential", seed=0)
        report = result.reports["mfm"]
        assert report.error is None
        assert report.pcr == 1.0

    def test_empty_algorithm_list(self):
        ds = small_benchmark_dataset()
        result = run_benchmark(ds, [], scenario="sequential", seed=0)
        assert result.reports == {}
        assert result.n_cases > 0

    def test_cases_shared_and_run_deterministic(self):
        ds = small_benchmark_dataset()
        a = run_benchmark(ds, ["fieldsense", "mfm"], scenario="random", seed=5)
        b = run_benchmark(ds, ["fieldsense", "mfm"], scenario="random", seed=5)
        assert a.to_dict() == b.to_dict()
        totals = {r.total for r in a.reports.values()}
        assert len(totals) == 1  # every algorithm saw the same case list

    def test_unknown_algorithm_name(self):
        with pytest.raises(ValueError, match="unknown algorithm"):
            make_algorithm("decision-forest")

    def test_training_failure_is_isolated(self, tmp_path):
        # every field textual and unique: the engine's preprocessing wipes
        # the table and raises, while the frequency baseline still runs
        schema = FormSchema(name="bad", fields=(
            FieldSchema(name="a", kind="textual", tab_index=0),
            FieldSchema(name="b", kind="categorical",
                        candidates=tuple(f"x{i}" for i in range(12)), tab_index=1),
        ))
        instances = [
            InputInstance(values={"a": f"u{i}", "b": None}, submitted_at=i)
            for i in range(20)
        ]
        ds = Dataset(schema=schema, instances=instances)
        result = run_benchmark(ds, ["fieldsense", "mfm"], seed=0)
        assert result.reports["fieldsense"].error is not None
        assert result.reports["mfm"].error is None

    def test_significance_entries_for_pairs(self):
        ds = small_benchmark_dataset()
        result = run_benchmark(ds, ["fieldsense", "mfm"], scenario="sequential", seed=1)
        if result.reports["fieldsense"].reciprocal_ranks:
            assert "fieldsense|mfm" in result.significance
            entry = result.significance["fieldsense|mfm"]
            assert 0.0 <= entry["p"] <= 1.0

    def test_engine_metrics_bounded(self):
        ds = small_benchmark_dataset()
        result = run_benchmark(ds, ["fieldsense"], seed=2)
        report = result.reports["fieldsense"]
        assert report.error is None
        if report.mrr is not None:
            assert 0.0 <= report.mrr <= 1.0
        assert 0.0 <= report.pcr <= 1.0
