"""Canonical certificate serialization.

A certificate is a full transcript of one proof: the dual pair, the chosen
parameters, every working extension's modulus polynomial, the main-stage
membership exponents, the per-conductor elliptic data, and the auxiliary
solution logs.  The text form is line oriented `key = value` under fixed
section headers, integers in decimal, polynomial coefficients ascending and
comma-separated; identical inputs serialize byte-identically, and a trailing
sha256 binds the body.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

FORMAT_HEADER = "cide certificate v1"


class CertificateFormatError(ValueError):
    pass


@dataclass
class ExtensionRecord:
    side: str   # "m" or "n"
    p: int
    level: int
    psi: tuple  # modulus polynomial, ascending, monic


@dataclass
class CppEntry:
    q: int
    p: int
    k: int
    b: int
    r: int
    eta: int


@dataclass
class ElkiesRecord:
    side: str
    ell: int
    x_eig: int
    factor: tuple
    etas: tuple   # tuples (q, u, e)
    lam: int


@dataclass
class Certificate:
    seed: int
    n: int
    m: int
    disc: int
    mu_a: int
    mu_b: int
    epsilon: int
    j_m: int
    j_n: int
    curve_m: tuple  # (A, B)
    curve_n: tuple
    point_m: tuple  # (x, y)
    point_n: tuple
    hilbert: tuple
    s: int
    t: int
    s_prime: int
    big_s: int
    l_primes: tuple
    extensions: list = field(default_factory=list)   # ExtensionRecord
    cpp_m: list = field(default_factory=list)        # CppEntry
    cpp_n: list = field(default_factory=list)
    elkies: list = field(default_factory=list)       # ElkiesRecord
    ace_solutions: dict = field(default_factory=dict)  # ell -> [(k,k',d)]
    verdict: str = "prime-pair"

    def body_lines(self) -> list:
        out = [FORMAT_HEADER, f"seed = {self.seed}"]
        out.append("[pair]")
        out.append(f"n = {self.n}")
        out.append(f"m = {self.m}")
        out.append(f"disc = {self.disc}")
        out.append(f"mu = {self.mu_a} {self.mu_b}")
        out.append(f"epsilon = {self.epsilon}")
        out.append(f"j_m = {self.j_m}")
        out.append(f"j_n = {self.j_n}")
        out.append(f"curve_m = {self.curve_m[0]} {self.curve_m[1]}")
        out.append(f"curve_n = {self.curve_n[0]} {self.curve_n[1]}")
        out.append(f"point_m = {self.point_m[0]} {self.point_m[1]}")
        out.append(f"point_n = {self.point_n[0]} {self.point_n[1]}")
        out.append("hilbert = " + ",".join(str(c) for c in self.hilbert))
        out.append("[params]")
        out.append(f"s = {self.s}")
        out.append(f"t = {self.t}")
        out.append(f"s_prime = {self.s_prime}")
        out.append(f"big_s = {self.big_s}")
        out.append("l_primes = " + ",".join(str(q) for q in self.l_primes))
        for rec in sorted(self.extensions, key=lambda r: (r.side, r.p, r.level)):
            out.append(f"[ext {rec.side} {rec.p} {rec.level}]")
            out.append("psi = " + ",".join(str(c) for c in rec.psi))
        for side, entries in (("m", self.cpp_m), ("n", self.cpp_n)):
            out.append(f"[cpp {side}]")
            for e in sorted(entries, key=lambda e: (e.q, e.p)):
                out.append(f"char = {e.q} {e.p} {e.k} {e.b} {e.r} {e.eta}")
        for rec in sorted(self.elkies, key=lambda r: (r.side, r.ell)):
            out.append(f"[elkies {rec.side} {rec.ell}]")
            out.append(f"x_eig = {rec.x_eig}")
            out.append("factor = " + ",".join(str(c) for c in rec.factor))
            for q, u, e in sorted(rec.etas):
                out.append(f"eta = {q} {u} {e}")
            out.append(f"lambda = {rec.lam}")
        out.append("[ace]")
        for ell in sorted(self.ace_solutions):
            triples = ";".join(f"{k},{kp},{d}" for k, kp, d in self.ace_solutions[ell])
            out.append(f"solutions {ell} = {triples}")
        out.append("[verdict]")
        out.append(f"verdict = {self.verdict}")
        return out

    def to_text(self) -> str:
        body = self.body_lines()
        digest = hashlib.sha256(("\n".join(body) + "\n").encode()).hexdigest()
        return "\n".join(body + ["[hash]", f"sha256 = {digest}"]) + "\n"

    def to_json(self) -> str:
        data = {
            "format": FORMAT_HEADER,
            "seed": self.seed,
            "pair": {
                "n": str(self.n), "m": str(self.m), "disc": self.disc,
                "mu": [str(self.mu_a), str(self.mu_b)], "epsilon": self.epsilon,
                "j_m": str(self.j_m), "j_n": str(self.j_n),
                "curve_m": [str(v) for v in self.curve_m],
                "curve_n": [str(v) for v in self.curve_n],
                "point_m": [str(v) for v in self.point_m],
                "point_n": [str(v) for v in self.point_n],
                "hilbert": [str(c) for c in self.hilbert],
            },
            "params": {
                "s": str(self.s), "t": self.t, "s_prime": str(self.s_prime),
                "big_s": str(self.big_s), "l_primes": list(self.l_primes),
            },
            "extensions": [
                {"side": r.side, "p": r.p, "level": r.level,
                 "psi": [str(c) for c in r.psi]}
                for r in sorted(self.extensions, key=lambda r: (r.side, r.p, r.level))
            ],
            "cpp": {
                side: [[e.q, e.p, e.k, str(e.b), str(e.r), e.eta] for e in
                       sorted(entries, key=lambda e: (e.q, e.p))]
                for side, entries in (("m", self.cpp_m), ("n", self.cpp_n))
            },
            "elkies": [
                {"side": r.side, "ell": r.ell, "x_eig": r.x_eig,
                 "factor": [str(c) for c in r.factor],
                 "etas": [list(t) for t in sorted(r.etas)], "lambda": r.lam}
                for r in sorted(self.elkies, key=lambda r: (r.side, r.ell))
            ],
            "ace": {str(ell): [list(t) for t in sols]
                    for ell, sols in sorted(self.ace_solutions.items())},
            "verdict": self.verdict,
        }
        digest = hashlib.sha256(("\n".join(self.body_lines()) + "\n").encode()).hexdigest()
        data["sha256"] = digest
        return json.dumps(data, indent=2, sort_keys=False) + "\n"


def _intlist(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(tok) for tok in text.split(","))


def parse_certificate(text: str) -> Certificate:
    """Strict parser for the canonical text form; verifies the detached hash."""
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise CertificateFormatError("missing format header")
    try:
        hash_at = lines.index("[hash]")
    except ValueError:
        raise CertificateFormatError("missing hash section") from None
    body = lines[:hash_at]
    tail = [ln for ln in lines[hash_at + 1:] if ln.strip()]
    if len(tail) != 1 or not tail[0].startswith("sha256 = "):
        raise CertificateFormatError("malformed hash section")
    digest = hashlib.sha256(("\n".join(body) + "\n").encode()).hexdigest()
    if tail[0] != f"sha256 = {digest}":
        raise CertificateFormatError("hash mismatch")

    fields = {}
    extensions = []
    cpp = {"m": [], "n": []}
    elkies = []
    ace_solutions = {}
    section = None
    for ln in body[1:]:
        if not ln.strip():
            continue
        if ln.startswith("["):
            section = ln.strip("[]").split()
            continue
        if "=" not in ln:
            raise CertificateFormatError(f"bad line: {ln!r}")
        key, _, val = ln.partition("=")
        key, val = key.strip(), val.strip()
        if section is None:
            fields[key] = val
        elif section[0] in ("pair", "params"):
            fields[key] = val
        elif section[0] == "ext":
            if key != "psi":
                raise CertificateFormatError(f"unexpected key in ext: {key}")
            extensions.append(ExtensionRecord(side=section[1], p=int(section[2]),
                                              level=int(section[3]),
                                              psi=_intlist(val)))
        elif section[0] == "cpp":
            if key != "char":
                raise CertificateFormatError(f"unexpected key in cpp: {key}")
            q, p, k, b, r, eta = (int(t) for t in val.split())
            cpp[section[1]].append(CppEntry(q=q, p=p, k=k, b=b, r=r, eta=eta))
        elif section[0] == "elkies":
            side, ell = section[1], int(section[2])
            current = None
            for rec in elkies:
                if rec.side == side and rec.ell == ell:
                    current = rec
            if current is None:
                current = ElkiesRecord(side=side, ell=ell, x_eig=0, factor=(),
                                       etas=(), lam=0)
                elkies.append(current)
            if key == "x_eig":
                current.x_eig = int(val)
            elif key == "factor":
                current.factor = _intlist(val)
            elif key == "eta":
                q, u, e = (int(t) for t in val.split())
                current.etas = current.etas + ((q, u, e),)
            elif key == "lambda":
                current.lam = int(val)
            else:
                raise CertificateFormatError(f"unexpected key in elkies: {key}")
        elif section[0] == "ace":
            if not key.startswith("solutions"):
                raise CertificateFormatError(f"unexpected key in ace: {key}")
            ell = int(key.split()[1])
            sols = []
            if val:
                for part in val.split(";"):
                    k1, k2, d = (int(t) for t in part.split(","))
                    sols.append((k1, k2, d))
            ace_solutions[ell] = sols
        elif section[0] == "verdict":
            fields["verdict"] = val
        else:
            raise CertificateFormatError(f"unknown section {section!r}")

    def need(key):
        if key not in fields:
            raise CertificateFormatError(f"missing field {key}")
        return fields[key]

    mu_a, mu_b = (int(t) for t in need("mu").split())
    curve_m = tuple(int(t) for t in need("curve_m").split())
    curve_n = tuple(int(t) for t in need("curve_n").split())
    point_m = tuple(int(t) for t in need("point_m").split())
    point_n = tuple(int(t) for t in need("point_n").split())
    return Certificate(
        seed=int(need("seed")),
        n=int(need("n")), m=int(need("m")), disc=int(need("disc")),
        mu_a=mu_a, mu_b=mu_b, epsilon=int(need("epsilon")),
        j_m=int(need("j_m")), j_n=int(need("j_n")),
        curve_m=curve_m, curve_n=curve_n, point_m=point_m, point_n=point_n,
        hilbert=_intlist(need("hilbert")),
        s=int(need("s")), t=int(need("t")), s_prime=int(need("s_prime")),
        big_s=int(need("big_s")), l_primes=_intlist(need("l_primes")),
        extensions=extensions, cpp_m=cpp["m"], cpp_n=cpp["n"], elkies=elkies,
        ace_solutions=ace_solutions, verdict=need("verdict"),
    )
