"""Independent numpy reference values for the core crate.

Run `python3 oracles/oracle.py` from the repository root to regenerate
crates/core/tests/fixtures/oracle.json. The Rust side only reads the
frozen file.
"""

import json
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/oracle.json"


def effective_radius(m):
    eps = m["permittivity"]
    return m["radius"] * ((eps - 1.0) / (eps + 2.0)) ** (1.0 / 3.0)


def amplitude(m):
    """Phase A and loss B of the single-photon overlap 1 + iA - B."""
    k, dx, l2 = m["k0"], m["separation"], m["box_edge"] ** 2
    c = math.cos(m["theta"])
    at6 = effective_radius(m) ** 6
    a = 8.0 * math.pi * dx * k**5 * at6 * c / (3.0 * l2)
    b = 2.0 * math.pi * dx**2 * k**6 * at6 * (3.0 + 11.0 * c * c) / (15.0 * l2)
    return a, b


def tau_d(m):
    c = math.cos(m["theta"])
    rate = (
        2.0 * math.pi / 15.0 * m["photon_density"] * m["separation"] ** 2
        * m["light_speed"] * effective_radius(m) ** 6 * m["k0"] ** 6 * (3.0 + 11.0 * c * c)
    )
    return 1.0 / rate


def toy(theta, loss):
    m = dict(radius=0.05, permittivity=3.0, separation=0.05, theta=theta, k0=1.5,
             box_edge=1.0, photon_density=1.0, light_speed=1.0)
    _, b1 = amplitude(m)
    m["box_edge"] = math.sqrt(b1 / loss)
    return m


def entropy_bits(rho):
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-15]
    return float(-(w * np.log2(w)).sum())


def ptrace(rho, dims, keep):
    n = len(dims)
    t = rho.reshape(dims + dims)
    idx = list(range(2 * n))
    for s in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=s, axis2=s + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def psd_sqrt(rho):
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(r1, r2):
    return float(np.linalg.svd(psd_sqrt(r1) @ psd_sqrt(r2), compute_uv=False).sum())


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for x in mats:
        out = np.kron(out, x)
    return out


def sfe_case(model, rho0, n, f, mfrac):
    """Dense S plus n photons after the controlled scattering, functionals of S:fE."""
    a, b = amplitude(model)
    o = complex(1.0 - b, a)
    phi = [np.array([1.0, 0.0], complex), np.array([o, math.sqrt(1.0 - abs(o) ** 2)], complex)]
    dims = [2] + [2] * n
    psi_branch = [kron_all([np.outer(phi[i], phi[j].conj()) for _ in range(n)])
                  for i in range(2) for j in range(2)]
    full = np.zeros((2 ** (n + 1), 2 ** (n + 1)), complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1.0
            full += rho0[i, j] * np.kron(e, psi_branch[2 * i + j])
    nf = round(f * n)
    keep = list(range(1 + nf))
    rho = ptrace(full, dims, keep)
    sdims = [2] + [2] * nf
    rho_s = ptrace(rho, sdims, [0])
    rho_e = ptrace(rho, sdims, list(range(1, 1 + nf))) if nf else np.eye(1)
    mi = entropy_bits(rho_s) + entropy_bits(rho_e) - entropy_bits(rho)
    blocks = rho.reshape(2, 2 ** nf, 2, 2 ** nf)
    off = np.zeros_like(blocks)
    off[0, :, 1, :] = blocks[0, :, 1, :]
    off[1, :, 0, :] = blocks[1, :, 0, :]
    coherent = float(np.linalg.svd(off.reshape(rho.shape), compute_uv=False).sum())
    p = [rho0[0, 0].real, rho0[1, 1].real]
    branch = [kron_all([np.outer(phi[i], phi[i].conj())] * nf) for i in range(2)]
    avg = p[0] * branch[0] + p[1] * branch[1]
    chi = entropy_bits(avg) - sum(pi * entropy_bits(bi) for pi, bi in zip(p, branch))
    nm = round(mfrac * n)
    overlap = None
    if nf:
        mac = [kron_all([np.outer(phi[i], phi[i].conj())] * nm) for i in range(2)]
        overlap = fidelity(mac[0], mac[1])
    return dict(n=n, f=f, m=mfrac, mutual_information=mi, coherent_norm=coherent,
                pairwise_overlap=overlap, holevo_chi=chi)


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = g @ g.conj().T
    return r / np.trace(r).real


def mat_json(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def counterexample(p):
    a, b = math.sqrt(p), math.sqrt(1 - p)
    psi = np.array([a, 0, 0, b], complex)
    phi = np.array([0, a, b, 0], complex)
    rho = p * np.outer(psi, psi) + (1 - p) * np.outer(phi, phi)
    mi = entropy_bits(ptrace(rho, [2, 2], [0])) + entropy_bits(ptrace(rho, [2, 2], [1])) - entropy_bits(rho)
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    q = p * p + (1 - p) ** 2
    h_b = -q * math.log2(q) - (1 - q) * math.log2(1 - q)
    return dict(p=p, mutual_information=mi, h_b=h_b, ppt_min_eig=float(np.linalg.eigvalsh(pt).min()))


def main():
    rng = np.random.default_rng(20261015)
    physical = dict(radius=1e-6, permittivity=2.0, separation=1e-7, theta=0.0, k0=1e4,
                    box_edge=1.0, photon_density=1e12, light_speed=299792458.0)
    models = []
    for m in [physical, dict(physical, theta=math.pi / 2), toy(math.pi / 2, 0.05), toy(0.9, 2e-3)]:
        a, b = amplitude(m)
        models.append(dict(model=m, phase=a, loss=b, tau_d=tau_d(m)))

    rho0 = random_density(rng, 2)
    sfe = []
    for model in [toy(math.pi / 2, 0.05), toy(math.pi / 2, 0.3), toy(0.9, 2e-3)]:
        cases = [sfe_case(model, rho0, n, f, m)
                 for n, f, m in [(8, 0.5, 0.25), (6, 0.5, 0.5), (4, 1.0, 0.5), (5, 0.2, 0.2), (3, 1.0, 1.0 / 3.0)]]
        sfe.append(dict(model=model, cases=cases))

    r1, r2 = random_density(rng, 4), random_density(rng, 4)
    qmat = dict(
        rho1=mat_json(r1), rho2=mat_json(r2),
        entropy1=entropy_bits(r1), entropy2=entropy_bits(r2),
        fidelity=fidelity(r1, r2),
        trace_norm_diff=float(np.linalg.svd(r1 - r2, compute_uv=False).sum()),
        ptrace1_keep0=mat_json(ptrace(r1, [2, 2], [0])),
        ptrace1_keep1=mat_json(ptrace(r1, [2, 2], [1])),
        ppt_min_eig1=float(np.linalg.eigvalsh(r1.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)).min()),
    )

    doc = dict(models=models, rho0=mat_json(rho0), sfe=sfe, qmat=qmat,
               counterexample=[counterexample(p) for p in (0.1, 0.3, 0.7)])
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
