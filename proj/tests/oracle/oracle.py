"""Independent reference values for the unit tests.

Built from scratch with numpy/scipy: spin-N/2 matrices from the standard ladder formula,
a generic Lindblad dissipator, heat as omega*d<J_z>/dt under the dissipator, and brute-force
sums for the quasi-probability table. Run once; the printed numbers are frozen in tests/unit.
"""
import itertools

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, logm, null_space


def spin(n):
    j = n / 2
    m = j - np.arange(n + 1)
    jp = np.zeros((n + 1, n + 1), complex)
    for k in range(1, n + 1):
        jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jm = jp.conj().T
    return (jp + jm) / 2, (jp - jm) / 2j, np.diag(m).astype(complex), jp, jm


def model(n, om, gam, nb):
    jx, jy, jz, jp, jm = spin(n)
    h = om * jx
    vp, vm = np.sqrt(2) * jp, np.sqrt(2) * jm
    gd, gu = gam * (nb + 1) / n, gam * nb / n

    def dis(r):
        out = np.zeros_like(r)
        for g, a in ((gd, vm), (gu, vp)):
            ad = a.conj().T
            out += g * (a @ r @ ad - 0.5 * (ad @ a @ r + r @ ad @ a))
        return out

    def lind(r):
        return -1j * (h @ r - r @ h) + dis(r)

    d = n + 1
    mdl = dict(jx=jx, jy=jy, jz=jz, h=h, dis=dis, lind=lind, d=d)
    if d <= 16:
        sup = np.zeros((d * d, d * d), complex)
        for c in range(d * d):
            e = np.zeros(d * d, complex)
            e[c] = 1
            sup[:, c] = lind(e.reshape(d, d, order="F")).reshape(-1, order="F")
        mdl["sup"] = sup
    return mdl


def coherent(n, theta, phi):
    jx, jy, jz, _, _ = spin(n)
    u = expm(-1j * phi * jz) @ expm(-1j * theta * jy)
    psi = u[:, 0]
    return np.outer(psi, psi.conj())


def steady(mdl):
    ns = null_space(mdl["sup"])
    r = ns[:, 0].reshape(mdl["d"], mdl["d"], order="F")
    r = r / np.trace(r)
    return (r + r.conj().T) / 2


def vn(r):
    w = np.linalg.eigvalsh(r)
    w = w[w > 1e-14]
    return float(-(w * np.log(w)).sum())


def section(title):
    print(f"\n# {title}")


def main():
    np.set_printoptions(precision=17)
    om_b = 1.5

    section("A: N=4, Omega=2, Gamma=1, n_beta=0.5, omega=1.5, coherent(theta=1.0, phi=0.3)")
    m = model(4, 2.0, 1.0, 0.5)
    r = coherent(4, 1.0, 0.3)
    print("Q_dot =", repr(float(om_b * np.trace(m["jz"] @ m["dis"](r)).real)))
    print("U_dot =", repr(float(np.trace(m["h"] @ m["dis"](r)).real)))
    rt = (expm(m["sup"]) @ r.reshape(-1, order="F")).reshape(5, 5, order="F")
    print("<V_z>/N at t=1 =", repr(float(np.sqrt(2) * np.trace(m["jz"] @ rt).real / 4)))
    print("<V_x>/N at t=1 =", repr(float(np.sqrt(2) * np.trace(m["jx"] @ rt).real / 4)))

    section("B: N=10, Omega=2, Gamma=1, n_beta=1 steady state")
    m = model(10, 2.0, 1.0, 1.0)
    pi = steady(m)
    print("<V_z>/N =", repr(float(np.sqrt(2) * np.trace(m["jz"] @ pi).real / 10)))
    print("S =", repr(vn(pi)))
    print("Q_dot =", repr(float(np.trace(m["jz"] @ m["dis"](pi)).real)))

    section("C: mean-field rhs by N -> infinity extrapolation at coherent(theta=1.1, phi=0.4), Omega=1.3, Gamma=0.7")
    vals = []
    for n in (400, 800):
        mdl = model(n, 1.3, 0.7, 0.0)
        r = coherent(n, 1.1, 0.4)
        lr = mdl["lind"](r)
        vals.append(np.array([np.sqrt(2) * np.trace(mdl[k] @ lr).real / n for k in ("jx", "jy", "jz")]))
    ext = 2 * vals[1] - vals[0]
    mvec = np.array([np.sin(1.1) * np.cos(0.4), np.sin(1.1) * np.sin(0.4), np.cos(1.1)]) / np.sqrt(2)
    print("m =", repr(mvec))
    print("dm/dt (extrapolated) =", repr(ext))

    section("D: mean-field period, Omega=2, Gamma=1, m0 = (-1/sqrt2, 0, 0)")

    def rhs(t, y, om=2.0, g=1.0):
        mx, my, mz = y
        # Large-N limit of d<V>/dt/N, written from the commutators directly.
        s = np.sqrt(2) * g
        return [s * mz * mx, mz * (s * my - om), om * my - s * (mx * mx + my * my)]

    ev = lambda t, y: y[2]
    ev.direction = 1
    sol = solve_ivp(rhs, (0, 60), [-1 / np.sqrt(2), 0, 0], rtol=1e-12, atol=1e-14, events=ev)
    te = sol.t_events[0]
    print("period =", repr(float(te[2] - te[1])))

    section("E: one collision, N=1, Omega=2, Gamma=1, n_beta=0.5, omega=1.5, dt=0.1, n_max=30, rho=|up>")
    nmax = 30
    a = np.diag(np.sqrt(np.arange(1, nmax + 1)), 1).astype(complex)
    nb = 0.5
    pa = (nb / (nb + 1)) ** np.arange(nmax + 1)
    anc = np.diag(pa / pa.sum()).astype(complex)
    jx, jy, jz, jp, jm = spin(1)
    dt = 0.1
    g = np.sqrt(1.0 / dt)
    hs = 2.0 * jx
    hj = (np.kron(hs, np.eye(nmax + 1)) + om_b * np.kron(np.eye(2), a.conj().T @ a)
          + g * np.sqrt(2) * (np.kron(jm, a.conj().T) + np.kron(jp, a)))
    u = expm(-1j * hj * dt)
    rho = np.diag([1.0, 0.0]).astype(complex)
    post = u @ np.kron(rho, anc) @ u.conj().T
    rs = np.einsum("iaja->ij", post.reshape(2, nmax + 1, 2, nmax + 1))
    ra = np.einsum("iaib->ab", post.reshape(2, nmax + 1, 2, nmax + 1))
    num = a.conj().T @ a
    print("heat =", repr(float(-om_b * (np.trace(num @ ra) - np.trace(num @ anc)).real)))
    print("rho_next[0,0] =", repr(float(rs[0, 0].real)))
    print("rho_next[0,1] =", repr(complex(rs[0, 1])))

    section("F: quasi-probability table, N=2, Omega=2, Gamma=1, n_beta=1, dt=0.1, rho=coherent(pi/2, pi)")
    m = model(2, 2.0, 1.0, 1.0)
    pi = steady(m)
    ch = expm(0.1 * m["sup"])
    apply = lambda x: (ch @ x.reshape(-1, order="F")).reshape(3, 3, order="F")
    rho = coherent(2, np.pi / 2, np.pi)
    rho = (expm(m["sup"]) @ rho.reshape(-1, order="F")).reshape(3, 3, order="F")  # mixed, full rank
    rho = (rho + rho.conj().T) / 2
    p, psi = np.linalg.eigh(rho)
    q, phi = np.linalg.eigh(apply(rho))
    rr, iv = np.linalg.eigh(pi)
    proj = [np.outer(iv[:, k], iv[:, k].conj()) for k in range(3)]
    tot, mean, ift, minw, mins = 0, 0, 0, 0, np.inf
    for mu, nu, i, j, k, l in itertools.product(range(3), repeat=6):
        x = proj[i] @ np.outer(psi[:, mu], psi[:, mu].conj()) @ proj[j]
        w = p[mu] * (phi[:, nu].conj() @ proj[k] @ apply(x) @ proj[l] @ phi[:, nu])
        s = np.log(p[mu]) - np.log(q[nu]) + 0.5 * (np.log(rr[k]) + np.log(rr[l]) - np.log(rr[i]) - np.log(rr[j]))
        tot += w
        mean += w * s
        ift += w * np.exp(-s)
        minw = min(minw, w.real)
        if abs(w) > 1e-12:
            mins = min(mins, s)
    print("total =", repr(complex(tot)))
    print("<sigma> =", repr(complex(mean)))
    print("<e^-sigma> =", repr(complex(ift)))
    print("min Re w =", repr(float(minw)))
    print("min sigma =", repr(float(mins)))
    # <sigma> must equal D(rho||pi) - D(N(rho)||pi).
    lp = logm(pi)
    closed = vn(apply(rho)) - vn(rho) + np.trace((apply(rho) - rho) @ lp).real
    print("D(rho||pi) - D(N rho||pi) =", repr(float(closed)))


if __name__ == "__main__":
    main()
