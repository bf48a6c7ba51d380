"""Reference values for the unit and acceptance tests, computed with numpy/scipy
independently of the C++ code."""

import numpy as np
from scipy import integrate, special, stats


def edgeworth(y, c3, c4):
    he = lambda k: special.eval_hermitenorm(k, y)
    return stats.norm.pdf(y) * (1 + c3 / 6 * he(3) + c4 / 24 * he(4) + c3**2 / 72 * he(6))


def main():
    print("hermite h2(2), h3(1), h4(0):", [special.eval_hermitenorm(k, y) for k, y in [(2, 2.0), (3, 1.0), (4, 0.0)]])
    print("edgeworth(0; c3=0, c4=1):", edgeworth(0.0, 0.0, 1.0))
    print("edgeworth mass on [-8, 8], c3=0.2, c4=0.3:", integrate.quad(edgeworth, -8, 8, args=(0.2, 0.3))[0])
    print("norm of diag(-2,-2) tensor:", np.sqrt(8.0))
    s = np.array([[1, 0.1], [0.1, 1]])
    print("residual of [[1,.1],[.1,1]]:", np.sqrt((s**2).sum() - 2) / np.sqrt((s**2).sum()))
    leak = np.array([[1, 0.01], [0.01, 1]])
    print("index of 1% leakage (dB):", 10 * np.log10((leak**2).sum() - 2) - 10 * np.log10(2))
    print("population kurtosis bpsk/uniform/laplace/gaussian:",
          [1 - 3, 9 / 5 - 3, stats.laplace.stats(moments="k"), 0.0])

    # Spread of the T=1e5 Laplace sample kurtosis.
    rng = np.random.default_rng(0)
    k = []
    for _ in range(400):
        x = rng.laplace(size=100_000)
        x -= x.mean()
        k.append((x**4).mean() / (x**2).mean() ** 2 - 3)
    k = np.array(k)
    print(f"laplace sample kurtosis at T=1e5: sd {k.std():.3f}, P(|k-3|<=0.1) {np.mean(abs(k - 3) <= 0.1):.2f}")
    print("kruskal 4M >= 2N+3 on (3,4), (2,3):", 4 * 3 >= 2 * 4 + 3, 4 * 2 >= 2 * 3 + 3)
    print("lifting dims M=4,N=2,order=29,L=20:", (4 * 20, 2 * (20 + 29)))


if __name__ == "__main__":
    main()
