import argparse

from otmap.apps import (
    bayes_lasso_transport,
    default_noise_variance,
    gibbs_lasso,
    lasso_map_estimate,
    load_regression_csv,
    summarize_posterior,
)
from otmap.utils import class2dict, dict2str


def main():
    """Compare transport and Gibbs posteriors of the Bayesian LASSO."""

    parser = argparse.ArgumentParser()
    parser.add_argument("-d", "--data", type=str, help="Regression CSV with a header row", required=True)
    parser.add_argument("-r", "--response", type=str, help="Response column", required=True)
    parser.add_argument("--lambda", dest="rate", type=float, help="Laplace prior rate", required=True)
    parser.add_argument("--order", type=int, help="Order of the dense map", default=4)

    args = parser.parse_args()

    dataset = load_regression_csv(args.data, args.response)
    noise_variance = default_noise_variance(dataset)

    result = bayes_lasso_transport(dataset, args.rate, noise_variance, order=args.order)
    draws = gibbs_lasso(dataset, args.rate, noise_variance)
    lasso = lasso_map_estimate(dataset, args.rate, noise_variance)

    for samples, method in ((result.samples, "transport"), (draws, "gibbs")):
        summary = summarize_posterior(samples, method, dataset.names)
        print(method)
        print(dict2str(class2dict({row["name"]: row for row in summary.to_rows(lasso)}), format=True))


if __name__ == "__main__":
    main()
