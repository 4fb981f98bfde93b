#!/usr/bin/env python3
"""Independent NB2/Poisson fit on the fixture corpus (scipy.optimize).

Frozen into fixtures/oracle/fit_oracle.json; the package's IRLS/Newton
fitter must land on the same optimum.
"""

from _oracle_common import build_design, fit_nb_scipy, fit_poisson_scipy, fixture_dir, read_jsonl, write_oracle


def main():
    fixtures = fixture_dir()
    records = read_jsonl(fixtures / "dataset.jsonl")
    scores = {row["video_id"]: row["scores"] for row in read_jsonl(fixtures / "scores_200.jsonl")}
    y, X, names = build_design(records, scores, response="views")

    beta_nb, alpha, ll_nb = fit_nb_scipy(y, X)
    beta_pois, ll_pois = fit_poisson_scipy(y, X)
    lr = 2.0 * (ll_nb - ll_pois)

    write_oracle(
        "fit_oracle.json",
        {
            "response": "views",
            "n": int(len(y)),
            "column_names": names,
            "nb_coefficients": {name: float(b) for name, b in zip(names, beta_nb)},
            "alpha": alpha,
            "ll_nb": float(ll_nb),
            "poisson_coefficients": {name: float(b) for name, b in zip(names, beta_pois)},
            "ll_poisson": float(ll_pois),
            "lr_statistic": float(lr),
        },
    )


if __name__ == "__main__":
    main()
