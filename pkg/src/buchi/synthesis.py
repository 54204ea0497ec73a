"""Formula synthesis from regular languages, validated by compiling back.

Existential (Σ₁) formulas are produced for unions of block regexes
v0 w1* v1 ... wk* vk; Σ₂ formulas for arbitrary zero-closed automata.
Every public synthesizer recompiles its output and raises
:class:`RoundTripError` with a distinguishing word if the languages differ.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian

from .automata import Dfa, counterexample, is_zero_closed, minimize, write_automaton, zero_closure
from .decide import compile as compile_formula
from .formulas import (
    FALSE,
    Const,
    Formula,
    Lin,
    Namer,
    Not,
    Pow,
    Val,
    conj,
    disj,
    exists,
    forall,
    is_power,
)
from .growth import leading_zero_set, length_set
from .numerics import UPSet, letter_digits
from .regex import BlockRegex, block_regex_to_dfa


class RoundTripError(RuntimeError):
    def __init__(self, message, counterexample=None):
        super().__init__(message if counterexample is None else f"{message}; counterexample {counterexample}")
        self.counterexample = counterexample


@dataclass(frozen=True)
class SynthesisConfig:
    """Tunable constants of the existential construction.

    ``trailing_offset`` is added to the number of trailing zeros of a starred
    word in the trailing-zero gates; ``v0_shift`` is an extra power of p
    multiplying the head word in the concatenation step.  The defaults are
    the values for which the constructions are exact.
    """

    trailing_offset: int = 0
    v0_shift: int = 0


DEFAULT_CONFIG = SynthesisConfig()


# --------------------------------------------------------------------------
# term helpers: arguments are variable names or integer constants


def _lin(terms, rel, rhs=0):
    coeffs, const = {}, 0
    for c, t in terms:
        if isinstance(t, int):
            const += c * t
        else:
            coeffs[t] = coeffs.get(t, 0) + c
    if not coeffs:
        from .formulas import _compare

        return Const(_compare(const, rel, rhs))
    return Lin.make(coeffs, rel, rhs - const)


def _pow(t, base):
    return Const(is_power(t, base)) if isinstance(t, int) else Pow(t)


def _namer(namer, *args):
    if namer is not None:
        namer.used.update(a for a in args if isinstance(a, str))
        return namer
    return Namer((a for a in args if isinstance(a, str)), prefix="_t")


def _digits_value(w, base):
    v = 0
    for d in w:
        v = v * base + d
    return v


def _word(w):
    if isinstance(w, str):
        return tuple(int(ch) for ch in w if ch != "ε")
    if hasattr(w, "columns"):
        return tuple(c[0] for c in w.columns)
    return tuple(w)


def as_formula(node, base, vars, **meta) -> Formula:
    return Formula(base, node, tuple(vars), tuple(meta.items()))


# --------------------------------------------------------------------------
# existential building blocks


def phi_W(base: int, x="x", y="y", namer=None):
    """y is the smallest power of p strictly greater than x."""
    return conj(_pow(y, base), _lin([(1, x), (-1, y)], "<", 0), _lin([(1, y), (-base, x)], "<=", 0))


def _w_or_zero(base, y, s, namer):
    """s = p^(number of digits of y); also covers y = 0 with s = 1."""
    return disj(phi_W(base, y, s, namer), conj(_lin([(1, y)], "=", 0), _lin([(1, s)], "=", 1)))


def phi_S(base: int, ell: int, x="x", y="y", namer=None, xcoef: int = 1):
    """x = p^r and y = p^(r + ell·i) for some i, r ≥ 0 (x scaled by the power ``xcoef``)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    namer = _namer(namer, x, y)
    z = namer.fresh("_z")
    gap = _lin([(1, y), (-xcoef, x), (-(base**ell - 1), z)], "=", 0)
    return conj(_pow(x, base), _pow(y, base), exists(z, conj(gap, _lin([(1, y), (-xcoef, x)], ">=", 0))))


def phi_S_U(base: int, U: UPSet, x="x", y="y", namer=None):
    """x = p^r and y = p^(r+u) for some r ≥ 0 and u ∈ U."""
    if U.is_empty:
        return FALSE
    namer = _namer(namer, x, y)
    options = [_lin([(1, y), (-(base**b), x)], "=", 0) for b in sorted(U.base_part)]
    options += [phi_S(base, U.period, x, y, namer, xcoef=base ** (U.threshold + r)) for r in sorted(U.residues)]
    return conj(_pow(x, base), _pow(y, base), disj(*options))


def phi_w_star(base: int, w, x="x", namer=None):
    """Values of w*: ⟦w^k⟧ = ⟦w⟧·(m^k − 1)/(m − 1) with m = p^|w|."""
    w = _word(w)
    if not w:
        return _lin([(1, x)], "=", 0)
    namer = _namer(namer, x)
    m = base ** len(w)
    val = _digits_value(w, base)
    y = namer.fresh("_y")
    return exists(y, conj(phi_S(base, len(w), 1, y, namer), _lin([(m - 1, x), (-val, y)], "=", -val)))


def _trailing_zeros(w):
    n = 0
    for d in reversed(w):
        if d:
            break
        n += 1
    return n


def phi_w_plus_zeros(base: int, w, U: UPSet, x="x", namer=None, config: SynthesisConfig = DEFAULT_CONFIG):
    """Values of w⁺ followed by u zeros, u ∈ U."""
    w = _word(w)
    if all(d == 0 for d in w):
        return FALSE if U.is_empty else _lin([(1, x)], "=", 0)
    namer = _namer(namer, x)
    y, z, s, t = (namer.fresh(h) for h in ("_y", "_z", "_s", "_t"))
    shifts = disj(*(_lin([(1, x), (-(base**i), z), (base**i, y)], "=", 0) for i in range(len(w))))
    first = conj(_lin([(1, y), (-1, z)], "<", 0), phi_w_star(base, w, y, namer), phi_w_star(base, w, z, namer), shifts)
    offset = _trailing_zeros(w) + config.trailing_offset
    gate = exists([s, t], conj(phi_S_U(base, U, 1, s, namer), Val(t, x), _lin([(1, t), (-(base**offset), s)], "=", 0)))
    return exists([y, z], conj(first, gate))


def _plus_dfa(base, head, blocks):
    return block_regex_to_dfa(BlockRegex(base, tuple(head), tuple((w, "+", v) for w, v in blocks)))


def _phi_plus_block(base, head, blocks, x, namer, config):
    """Values of head w1⁺ v1 ... wk⁺ vk (every block exponent at least one)."""
    head = tuple(head)
    if not blocks:
        return _lin([(1, x)], "=", _digits_value(head, base))
    (w1, v1), rest = blocks[0], blocks[1:]
    # N = w1⁺ M with M = v1 w2⁺ v2 ... ; values of N first
    if all(d == 0 for d in w1):
        psi = lambda target: _phi_plus_block(base, v1, rest, target, namer, config)  # noqa: E731
    else:
        m_dfa = _plus_dfa(base, v1, rest)
        U = length_set(m_dfa)
        V = leading_zero_set(m_dfa)

        def psi(target):
            y, z, s, t, t2 = (namer.fresh(h) for h in ("_y", "_z", "_s", "_t", "_u"))
            offset = _trailing_zeros(w1) + config.trailing_offset
            gate = exists([s, t, t2], conj(
                _w_or_zero(base, y, s, namer),
                phi_S_U(base, V, s, t, namer),
                _lin([(1, t2), (-(base**offset), t)], "=", 0),
                Val(t2, z),
            ))
            return exists([y, z], conj(
                _phi_plus_block(base, v1, rest, y, namer, config),
                phi_w_plus_zeros(base, w1, U, z, namer, config),
                _lin([(1, target), (-1, y), (-1, z)], "=", 0),
                gate,
            ))

    v0 = _digits_value(head, base)
    if v0 == 0:
        return psi(x)
    T = leading_zero_set(_plus_dfa(base, (), blocks))
    y, z, s = (namer.fresh(h) for h in ("_y", "_z", "_s"))
    scale = v0 * base**config.v0_shift
    return exists([y, z, s], conj(
        _lin([(1, x), (-1, y), (-scale, z)], "=", 0),
        psi(y),
        _w_or_zero(base, y, s, namer),
        phi_S_U(base, T, s, z, namer),
    ))


def plus_variants(r: BlockRegex) -> list[BlockRegex]:
    """Star-free case split: every starred block either becomes w⁺ or disappears."""
    out = []
    choices = [(True,) if mode == "+" else (True, False) for _, mode, _ in r.blocks]
    for keep in cartesian(*choices):
        head, blocks = list(r.head), []
        for (w, _, v), k in zip(r.blocks, keep):
            if k and w:
                blocks.append((w, list(v)))
            else:
                # the block vanishes (ε⁺ = ε as well): its tail joins the previous segment
                (blocks[-1][1] if blocks else head).extend(v)
        out.append(BlockRegex(r.base, tuple(head), tuple((w, "+", tuple(v)) for w, v in blocks)))
    return out


def _language_key(a: Dfa) -> str:
    return write_automaton(minimize(a))


def _check_round_trip(f: Formula, target: Dfa, what: str):
    got = compile_formula(f)
    cex = counterexample(got, target)
    if cex is not None:
        raise RoundTripError(f"{what}: compiled formula differs from the target language", cex)


def synth_existential(r, config: SynthesisConfig = DEFAULT_CONFIG, var: str = "x", validate: bool = True) -> Formula:
    """Existential formula whose value set is that of a union of block regexes."""
    regexes = [r] if isinstance(r, BlockRegex) else list(r)
    if not regexes:
        raise ValueError("need at least one block regex")
    base = regexes[0].base
    if any(b.base != base for b in regexes):
        raise ValueError("block regexes over different bases")
    namer = Namer([var], prefix="_t")
    seen, parts = set(), []
    for br in regexes:
        for pf in plus_variants(br):
            key = _language_key(zero_closure(block_regex_to_dfa(pf)))
            if key in seen:
                continue
            seen.add(key)
            parts.append(_phi_plus_block(base, pf.head, [(w, v) for w, _, v in pf.blocks], var, namer, config))
    meta = {
        "construction": "existential, plus-form case split",
        "source": " | ".join(str(b) for b in regexes),
        "branches": len(parts),
        "star_modulus": "p^|w|",
        "trailing_offset": config.trailing_offset,
        "v0_shift": config.v0_shift,
    }
    f = as_formula(disj(*parts), base, (var,), **meta)
    if validate:
        _check_round_trip(f, zero_closure(block_regex_to_dfa(regexes)), "existential synthesis")
        f = f.with_meta(round_trip="ok")
    return f


# --------------------------------------------------------------------------
# digit extraction and the Σ₂ construction


def _digit_body(base, j, x, y, t, u, z, xcoef):
    xs = [(xcoef, x)]
    eq = _lin([(1, y), (-1, z), (-1, t)] + [(-j * c, v) for c, v in xs], "=", 0)
    low = _lin([(1, z)] + [(-c, v) for c, v in xs], "<", 0)
    high = disj(conj(Val(u, t), _lin([(c, v) for c, v in xs] + [(-1, u)], "<", 0)), _lin([(1, t)], "=", 0))
    return conj(eq, low, high)


def phi_digit(base: int, j: int, x="x", y="y", namer=None, xcoef: int = 1):
    """x = p^k and the digit of y at p^k is j (existential).  ``xcoef`` scales x by a power of p."""
    if not 0 <= j < base:
        raise ValueError(f"digit {j} out of range for base {base}")
    namer = _namer(namer, x, y)
    t, u, z = namer.fresh("_t"), namer.fresh("_u"), namer.fresh("_z")
    return conj(_pow(x, base), exists([t, u, z], _digit_body(base, j, x, y, t, u, z, xcoef)))


def phi_digit_pi1(base: int, j: int, x="x", y="y", namer=None, xcoef: int = 1):
    """Universal variant: x is a power of p and no other digit value sits at x in y."""
    if not 0 <= j < base:
        raise ValueError(f"digit {j} out of range for base {base}")
    namer = _namer(namer, x, y)
    parts = [_pow(x, base)]
    for other in range(base):
        if other == j:
            continue
        t, u, z = namer.fresh("_t"), namer.fresh("_u"), namer.fresh("_z")
        parts.append(forall([t, u, z], _negate_nnf(_digit_body(base, other, x, y, t, u, z, xcoef))))
    return conj(*parts)


def _negate_nnf(node):
    from .formulas import to_nnf

    return to_nnf(Not(node))


def _not_digit(base, j, x, y, namer, xcoef=1):
    return _negate_nnf(phi_digit(base, j, x, y, namer, xcoef))


def synth_sigma2(a: Dfa, vars=None, validate: bool = True) -> Formula:
    """Σ₂ formula whose solutions are the decoded language of a zero-closed automaton.

    Numbers X_0..X_{k-1} spell, digit by digit, a binary code of the run
    state of ``a`` on the encoding of the query variables (most significant
    column first, positions addressed by powers u of p below a power b that
    bounds every variable).  One universal block over u checks the run.
    """
    if not is_zero_closed(a):
        raise ValueError("Σ₂ synthesis needs a zero-closed automaton")
    a = minimize(a)
    p, d = a.base, a.dim
    if vars is None:
        vars = ("x",) if d == 1 else tuple(f"x{i}" for i in range(d))
    vars = tuple(vars)
    if len(vars) != d:
        raise ValueError(f"{len(vars)} names for {d} tracks")
    namer = Namer(vars, prefix="_t")
    k = max(1, (a.n_states - 1).bit_length())
    X = [namer.fresh(f"_X{i}") for i in range(k)]
    b, u = namer.fresh("_b"), namer.fresh("_u")

    def code(q):
        return [(q >> i) & 1 for i in range(k)]

    def bits_equal(pos, q, positive, xcoef=1):
        if positive:
            return conj(*(phi_digit_pi1(p, c, pos, X[i], namer, xcoef) for i, c in enumerate(code(q))))
        return conj(*(phi_digit(p, c, pos, X[i], namer, xcoef) for i, c in enumerate(code(q))))

    def bits_differ(pos, q, xcoef=1):
        return disj(*(_not_digit(p, c, pos, X[i], namer, xcoef) for i, c in enumerate(code(q))))

    clauses = []
    for q in range(a.n_states):
        for letter in range(p**d):
            sigma = letter_digits(letter, p, d)
            target = a.delta[q].get(letter)
            consequent = FALSE if target is None else bits_equal(u, target, True)
            clauses.append(disj(
                _lin([(1, u), (-1, b)], ">=", 0),
                bits_differ(u, q, xcoef=p),
                *(_not_digit(p, s, u, x, namer) for s, x in zip(sigma, vars)),
                consequent,
            ))
    accept = disj(*(bits_equal(1, q, False) for q in sorted(a.finals)))
    body = conj(
        Pow(b),
        *(_lin([(1, x), (-1, b)], "<", 0) for x in vars),
        bits_equal(b, a.initial, False),
        accept,
        forall(u, conj(*clauses)),
    )
    node = exists(X + [b], body)
    meta = {"construction": "sigma2, forward run with binary state code", "states": a.n_states, "code_bits": k}
    f = as_formula(node, p, vars, **meta)
    if validate:
        _check_round_trip(f, a, "Σ₂ synthesis")
        f = f.with_meta(round_trip="ok")
    return f
