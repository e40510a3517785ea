import json
from math import factorial

import pytest

from qmaj import verify
from qmaj.errors import GuardExceededError, MalformedInputError
from qmaj.qpoly import QPoly
from qmaj.verify import (
    Identity,
    VerificationReport,
    dp_bucket_sums,
    permutation_blocks,
    verify_eq1,
    verify_eq2,
    verify_eq3,
    verify_eq5,
    verify_roundtrips,
    verify_thm1,
)


def strip_timing(report):
    return report.to_dict(timing=False)


class TestReport:
    def test_failed_report_needs_witness(self):
        with pytest.raises(ValueError):
            VerificationReport(Identity.EQ1, {"n": 3}, False)

    def test_json_layout(self):
        r = VerificationReport(Identity.EQ5, {"n": 2}, True, None, 3)
        assert r.to_json() == (
            '{"identity": "EQ5", "params": {"n": 2}, "passed": true, '
            '"witness": null, "elapsed_ms": 3}'
        )
        assert json.loads(r.to_json(timing=False))["elapsed_ms"] is None


class TestMajDistribution:
    @pytest.mark.parametrize("n", [0, 1, 3, 6])
    def test_passes(self, n):
        r = verify_eq1(n)
        assert r.passed and r.witness is None and r.params == {"n": n}

    def test_failure_carries_witness(self, monkeypatch):
        monkeypatch.setattr(verify, "q_factorial", lambda n: QPoly((1, 2, 3, 1)))
        r = verify_eq1(3)
        assert not r.passed
        assert r.witness["coefficient"] == 2
        assert r.witness["enumerated"] == 2 and r.witness["q_factorial"] == 3
        assert r.witness["replay"] == "qmaj verify eq1 --n 3"

    def test_guard(self):
        with pytest.raises(GuardExceededError):
            verify_eq1(13)
        with pytest.raises(GuardExceededError):
            verify_eq1(5, guard=4)


class TestCoefficientCount:
    def test_examples(self):
        assert verify_eq2(1, 6).passed
        assert verify_eq2(2, 2).passed
        assert verify_eq2(0, 3).passed

    def test_n2_m2_has_three_pairs(self):
        # ((2,0),12), ((1,1),12), ((1,0),21): by hand
        from qmaj.combinat import iter_partitions_with_sum, iter_permutations, major_index

        pairs = [
            (lam, p)
            for p in iter_permutations(2)
            for lam in iter_partitions_with_sum(2, 2 - major_index(p))
        ]
        assert sorted(pairs) == [((1, 0), (2, 1)), ((1, 1), (1, 2)), ((2, 0), (1, 2))]

    def test_witness_when_count_is_wrong(self, monkeypatch):
        monkeypatch.setattr(verify, "_sequence_count", lambda n, m: 99)
        r = verify_eq2(2, 3)
        assert not r.passed
        assert r.witness["m"] == 0 and r.witness["binomial"] == 99

    def test_bad_params(self):
        with pytest.raises(MalformedInputError):
            verify_eq2(2, -1)


class TestDerangementRoutes:
    def test_small(self):
        assert verify_eq3(1).passed
        assert verify_eq3(3).passed

    def test_witness(self, monkeypatch):
        monkeypatch.setattr(verify, "q_derangement_formula", lambda n: QPoly((0, 1)))
        r = verify_eq3(3)
        assert not r.passed
        assert r.witness["bruteforce"] == [0, 1, 1]
        assert r.witness["formula"] == [0, 1]


class TestThm1:
    def test_sigma_21_bucket_in_s3(self):
        # (1,3,2), (3,2,1), (2,1,3) have maj 2, 3, 1
        buckets = dp_bucket_sums(3)
        assert buckets[(2, 1)] == QPoly((0, 1, 1, 1))
        assert buckets[()] == QPoly((1,))

    @pytest.mark.parametrize("n", range(7))
    def test_passes(self, n):
        r = verify_thm1(n)
        assert r.passed
        assert r.params["permutations"] == factorial(n)

    def test_bucket_keys_are_all_derangements(self):
        from qmaj.combinat import iter_derangements

        buckets = dp_bucket_sums(5)
        expected = {s for k in range(6) for s in iter_derangements(k)}
        assert set(buckets) == expected
        assert sum(p.evaluate(1) for p in buckets.values()) == 120

    def test_witness(self, monkeypatch):
        monkeypatch.setattr(verify, "q_binomial", lambda n, k: QPoly((1,)))
        r = verify_thm1(3)
        assert not r.passed
        assert r.witness["sigma"] == [2, 1]


class TestInversion:
    @pytest.mark.parametrize("n", range(11))
    def test_passes(self, n):
        assert verify_eq5(n).passed

    def test_n2_by_hand(self):
        from qmaj.qpoly import q_binomial, q_derangement_formula, q_factorial

        parts = [q_binomial(2, k) * q_derangement_formula(k) for k in range(3)]
        assert parts == [QPoly((1,)), QPoly(()), QPoly((0, 1))]
        assert sum(parts, QPoly(())) == q_factorial(2)


class TestRoundtrips:
    def test_reports(self):
        reports = verify_roundtrips(4, trials=10, seed=42)
        assert [r.identity for r in reports] == [
            Identity.ROUNDTRIP_PSI,
            Identity.ROUNDTRIP_PHI,
            Identity.WEIGHT_EQ6,
        ]
        assert all(r.passed for r in reports)
        psi_r, phi_r, weight_r = reports
        assert psi_r.params["instances"] == 24 * 10
        # 24 forward instances per trial plus 1+0+1+2+9 inverse ones
        assert phi_r.params["instances"] == 24 * 10 + 13 * 10
        assert phi_r.params["insertions"] == (
            phi_r.params["single_candidate"] + phi_r.params["multi_candidate"]
        )

    def test_identity_permutation(self):
        from qmaj.bijections import phi_decompose, psi, psi_inv, LabeledPartition

        lam = (7, 3, 3, 0)
        dec = phi_decompose(psi(lam, (1, 2, 3, 4)))
        assert dec.beta == () and dec.sigma == () and dec.gamma == lam
        assert psi_inv(LabeledPartition(dec.beta, dec.sigma)) == ()

    def test_worked_chain(self):
        from qmaj.bijections import phi_decompose, psi, psi_inv, LabeledPartition

        dec = phi_decompose(psi((5, 4, 4, 4, 4, 3, 2), (5, 2, 1, 4, 7, 3, 6)))
        alpha = psi_inv(LabeledPartition(dec.beta, dec.sigma))
        assert (alpha, dec.gamma, dec.sigma) == ((6, 4, 4, 3, 2), (6, 5), (3, 1, 5, 2, 4))
        assert sum((5, 4, 4, 4, 4, 3, 2)) + 8 == sum(alpha) + sum(dec.gamma) + 4

    def test_seed_changes_nothing_but_the_sample(self):
        a = verify_roundtrips(3, trials=5, seed=1)
        b = verify_roundtrips(3, trials=5, seed=2)
        assert all(r.passed for r in a + b)
        assert [r.params["seed"] for r in a] == [1, 1, 1]

    def test_failure_is_recorded(self, monkeypatch):
        real = verify.phi_insert

        def broken(beta, sigma, gamma, trace=None):
            lp = real(beta, sigma, gamma, trace=trace)
            return verify.LabeledPartition(lp.mu, tuple(range(1, len(lp.pi) + 1)))

        monkeypatch.setattr(verify, "phi_insert", broken)
        psi_r, phi_r, _ = verify_roundtrips(3, trials=3, seed=42)
        assert psi_r.passed
        assert not phi_r.passed
        assert "replay" in phi_r.witness


class TestParallel:
    def test_blocks(self):
        assert permutation_blocks(0) == [()]
        assert permutation_blocks(3) == [(1,), (2,), (3,)]

    def test_thm1_parallel_matches_serial(self):
        serial = verify_thm1(6, threads=1)
        parallel = verify_thm1(6, threads=3)
        assert strip_timing(serial) == strip_timing(parallel)
        assert dp_bucket_sums(5, threads=1) == dp_bucket_sums(5, threads=4)
        assert list(dp_bucket_sums(5, threads=1)) == list(dp_bucket_sums(5, threads=4))

    def test_eq1_parallel_matches_serial(self):
        assert strip_timing(verify_eq1(7, threads=1)) == strip_timing(verify_eq1(7, threads=4))

    def test_roundtrips_parallel_matches_serial(self):
        a = [strip_timing(r) for r in verify_roundtrips(4, trials=5, seed=9, threads=1)]
        b = [strip_timing(r) for r in verify_roundtrips(4, trials=5, seed=9, threads=3)]
        assert a == b

    def test_progress_lines(self):
        lines = []
        verify_eq1(3, progress=lines.append)
        assert lines == [f"eq1: block {i}/3 prefix ({i}) done" for i in (1, 2, 3)]
