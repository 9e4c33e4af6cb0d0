def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, n):
    G = random_complex(rng, (n, n))
    return (G + G.conj().T) / 2.0


def random_psd(rng, n, rank):
    G = random_complex(rng, (n, rank))
    return G @ G.conj().T
