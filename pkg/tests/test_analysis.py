import csv
import io
import json
import math
from fractions import Fraction

import pytest

from eulercf.analysis import (
    InsufficientPrecisionError,
    TableCorruptError,
    aptekarev_integer_form_growth,
    delta_reference,
    error_table,
    gamma_reference,
    integrality_report,
    laguerre_q,
    lemma_i_check,
    linform_asymptotics,
    log_abs,
    required_precision,
)
from eulercf.linforms import GAMMA_SPEC, linform_value
from eulercf.numkit import const_e, gamma_digits, gamma_table, lcm_upto
from eulercf.sequences import gamma_p, gamma_q, stieltjes_s

NS = (100, 400, 900, 1600)


def test_gamma_reference():
    assert str(gamma_reference(17)) == "0.57721566490153286"
    assert str(gamma_reference(5)) == "0.57721"


def test_delta_reference():
    assert str(delta_reference(10)) == "0.5963473623"
    assert str(delta_reference(4)) == "0.5963"


def test_delta_reference_against_series_of_cf():
    # Stieltjes convergents approach delta from one side with error ~ e^{-4 sqrt n}
    s = stieltjes_s(400)
    approx = Fraction(s[400], gamma_q(400))
    assert abs(approx - delta_reference(40).to_fraction()) < Fraction(1, 10**30)


def test_corrupt_table_is_rejected():
    digits = gamma_digits()
    # the gate resolves about 3 * 2 pi e^-80 ~ 3e-34
    i = 2 + 20
    bad = digits[:i] + str((int(digits[i]) + 1) % 10) + digits[i + 1 :]
    with gamma_table(bad):
        with pytest.raises(TableCorruptError):
            gamma_reference(20)
    # a perturbation below the gate's resolution passes
    i = 2 + 70
    fine = digits[:i] + str((int(digits[i]) + 1) % 10) + digits[i + 1 :]
    with gamma_table(fine):
        assert str(gamma_reference(17)) == "0.57721566490153286"


def test_error_table_small_n():
    rep = error_table("gamma-main", [4], 60)
    row = rep.rows[0]
    assert row.approx == gamma_p(4) / 209 == Fraction(725, 1254)
    err = abs(row.approx - gamma_reference(70).to_fraction())
    assert abs(row.err.to_fraction() - err) < Fraction(1, 10**59)
    # order 2 pi e^-8
    assert 0.1 < float(row.err.to_fraction()) / (2 * math.pi * math.exp(-8)) < 1


def test_insufficient_precision():
    need = required_precision("gamma-main", [1600])
    assert need == math.floor(4 * 40 / math.log(10) + 20) + 1
    with pytest.raises(InsufficientPrecisionError) as info:
        error_table("gamma-main", [100, 1600], need - 1)
    assert info.value.required == need
    with pytest.raises(InsufficientPrecisionError):
        linform_asymptotics([1600], 50)
    with pytest.raises(KeyError):
        error_table("nosuch", [10], 60)


def test_report_formats():
    rep = error_table("gamma-main", [10, 20], 40)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["family", "n", "approx_num", "approx_den", "err", "predicted", "ratio"]
    assert [r[1] for r in rows[1:]] == ["10", "20"]
    assert all(len(r[4].split(".")[1]) == 40 for r in rows[1:])
    obj = json.loads(rep.to_json())
    assert obj["family"] == "gamma-main"
    assert [r["n"] for r in obj["rows"]] == [10, 20]
    assert obj["rows"][0]["err"] == rows[1][4]
    assert set(obj["rows"][0]) == set(rows[0])


def test_rows_sorted_and_reproducible():
    a = error_table("aptekarev", [50, 10, 30], 60)
    b = error_table("aptekarev", [30, 50, 10], 60)
    assert [r.n for r in a.rows] == [10, 30, 50]
    assert a.to_csv() == b.to_csv()
    assert a == b


@pytest.mark.parametrize("family", ["gamma-main", "aptekarev", "delta-stieltjes", "rivoal"])
def test_errors_positive(family):
    rep = error_table(family, range(1, 41), 60)
    assert all(r.err.sign() > 0 and r.predicted.sign() > 0 for r in rep.rows)


def test_gamma_main_errors_decrease():
    rep = error_table("gamma-main", range(1, 201), 80)
    errs = [r.err for r in rep.rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_shared_denominators():
    main = error_table("gamma-main", [5, 17, 40], 60)
    delta = error_table("delta-stieltjes", [5, 17, 40], 60)
    for m, d in zip(main.rows, delta.rows):
        q = gamma_q(m.n)
        assert (m.approx * q * lcm_upto(m.n)).denominator == 1
        assert (d.approx * q).denominator == 1
        assert d.approx == Fraction(stieltjes_s(m.n)[m.n], q)


def test_ratio_trends():
    # calibrated at P = 120: gamma-main 0.8789, 0.9375, 0.9579, 0.9682;
    # aptekarev 0.8669, 0.9310, 0.9535, 0.9649
    for family in ("gamma-main", "aptekarev"):
        rep = error_table(family, NS, 120)
        assert rep.trend == "decreasing"
        assert abs(rep.rows[-1].ratio.to_fraction() - 1) < Fraction(1, 25)


def test_delta_stieltjes_constant_is_bounded():
    # calibrated fitted constants 15.01, 16.01, 16.36, 16.54
    rep = error_table("delta-stieltjes", NS, 120)
    assert all(14 < r.ratio.to_fraction() < 18 for r in rep.rows)


def test_linform_constants():
    rep = linform_asymptotics(NS, 120)
    assert abs(rep.target_form.to_fraction() - Fraction(1.0750476)) < Fraction(1, 10**6)
    assert abs(rep.target_denom.to_fraction() - Fraction(0.1710991)) < Fraction(1, 10**6)
    tf, td = rep.target_form.to_fraction(), rep.target_denom.to_fraction()
    last = rep.rows[-1]
    assert abs(last.c_denom.to_fraction() / td - 1) < Fraction(1, 10)
    assert abs(last.c_form.to_fraction() / tf - 1) < Fraction(1, 10)
    # cF cq -> 1/(2e); calibrated relative gaps 3.4e-3, 8.6e-4, 3.8e-4, 2.1e-4
    two_e = 2 * const_e(120).to_fraction()
    gaps = [abs(r.c_form.to_fraction() * r.c_denom.to_fraction() * two_e - 1) for r in rep.rows]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < Fraction(1, 1000)


def test_laguerre_identity():
    for n in range(101):
        oracle = sum(Fraction(math.comb(n, k), math.factorial(k)) for k in range(n + 1)) * math.factorial(n)
        assert laguerre_q(n) == oracle == gamma_q(n)


def test_lemma_i():
    assert lemma_i_check(range(0, 101), 60)
    bumped = lemma_i_check(range(0, 11), 60, lambda n, P: linform_value(GAMMA_SPEC, n, P) + 1)
    assert not bumped
    # at n = 0 the bound is e, wide enough to absorb the shift
    assert bumped.witness[0] == 1


def test_integrality_report():
    rep = integrality_report(200)
    assert rep.passed
    assert len(rep.claims) == 10
    assert all(line.endswith("values)") and "PASS" in line for line in rep.lines())
    assert 6 * gamma_p(3) == 118


def test_log_abs():
    x = Fraction(3, 7) * Fraction(10) ** 500
    ref = math.log(3 / 7) + 500 * math.log(10)
    assert abs(float(log_abs(x, 30).to_fraction()) - ref) < 1e-9
    assert abs(float(log_abs(Fraction(1, 3**900), 30).to_fraction()) + 900 * math.log(3)) < 1e-9
    with pytest.raises(ValueError):
        log_abs(Fraction(0), 10)


def test_aptekarev_integer_form_growth():
    # calibrated log-ratios at 10, 50, 100, 200, 400: -1.71, 0.10, -5.31, 6.81, -1.49;
    # the fluctuation tracks ln D_n - n, which is O(sqrt n log^2 n)
    for n, v in aptekarev_integer_form_growth([10, 50, 100, 200, 400], 30):
        assert abs(v.to_fraction()) < math.sqrt(n)


def test_rivoal_quotient_stays_bounded():
    # err / e^{-9/2 n^{2/3} + 3/2 n^{1/3}} oscillates with a slowly rising
    # peak (5.2 near n=15, 6.5 near 49, 7.9 near 145), so it is O(1) here
    # even though a c0 fitted on n <= 50 is overtaken at n = 55; it dips
    # toward 0 where P_n/Q_n - gamma changes sign
    rep = error_table("rivoal", range(10, 151), 120)
    assert all(r.ratio.to_fraction() < 10 for r in rep.rows)
