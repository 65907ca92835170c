"""The Hall algebra at a fixed prime, in the rescaled basis <u_lambda>.

Elements are finitely supported maps IsoClass -> Q(sqrt q).  The product is

    <u_a><u_b> = v^{-<b,a>} sum_lam g^lam_{ab} <u_lam>,

divided powers, the four derivations of the r/r'/delta family, the Ringel
pairing and transport along sink reflection functors all live here.
"""

from __future__ import annotations

from fractions import Fraction

from .classtable import ClassTable, IsoClass, ZERO_CLASS
from .modules import reflect_plus
from .quivers import dim_add, dim_sub, euler_bilinear, euler_symmetric
from .scalars import QSqrtScalar, eval_at_sqrt_q, quantum_factorial


class HallElement:
    """A finitely supported Q(sqrt q)-combination of basis vectors <u_cls>."""

    __slots__ = ("table", "coeffs")

    def __init__(self, table: ClassTable, coeffs=None):
        self.table = table
        d = {}
        if coeffs:
            for cls, c in coeffs.items():
                if not isinstance(c, QSqrtScalar):
                    c = QSqrtScalar.of_int(c, table.q)
                if not c.is_zero():
                    d[cls] = c
        self.coeffs = d

    # -- basics -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self):
        return sorted(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HallElement):
            return NotImplemented
        return (self.table.quiver == other.table.quiver
                and self.table.q == other.table.q and self.coeffs == other.coeffs)

    def __add__(self, other):
        d = dict(self.coeffs)
        for cls, c in other.coeffs.items():
            s = d.get(cls, QSqrtScalar.zero(self.table.q)) + c
            if s.is_zero():
                d.pop(cls, None)
            else:
                d[cls] = s
        return HallElement(self.table, d)

    def __sub__(self, other):
        return self + other.scale(QSqrtScalar.of_int(-1, self.table.q))

    def scale(self, c) -> "HallElement":
        if not isinstance(c, QSqrtScalar):
            c = QSqrtScalar.of_int(c, self.table.q)
        return HallElement(self.table, {cls: v * c for cls, v in self.coeffs.items()})

    def weights(self):
        return {self.table.class_dim(cls) for cls in self.coeffs}

    def pure_weight(self):
        ws = self.weights()
        if len(ws) != 1:
            raise ValueError(f"element of mixed weight: {sorted(ws)}")
        return next(iter(ws))

    def __str__(self):
        if self.is_zero():
            return "0"
        bits = []
        for cls in self.support():
            c = self.coeffs[cls]
            bits.append(f"({c})*u[{cls.label}]")
        return " + ".join(bits)

    __repr__ = __str__

    def to_json(self):
        """[[class label, "a + b*sqrt(q)"], ...] with exact rationals."""
        return [[cls.label, str(self.coeffs[cls])] for cls in self.support()]


def zero_element(table: ClassTable) -> HallElement:
    return HallElement(table)


def identity_element(table: ClassTable) -> HallElement:
    return HallElement(table, {ZERO_CLASS: 1})


def rescale(table: ClassTable, cls: IsoClass) -> HallElement:
    """The basis vector <u_cls>; unknown labels are rejected."""
    for part in cls.parts:
        if part not in table.by_label:
            raise KeyError(f"unknown indecomposable label {part!r}")
    return HallElement(table, {cls: 1})


def rescale_exponent(table: ClassTable, cls: IsoClass) -> int:
    """The exponent e with <u_cls> = v^e u_cls, namely -dim + <cls, cls>."""
    d = table.class_dim(cls)
    return -sum(d) + table.epsilon(cls)


def chevalley(table: ClassTable, v: int) -> HallElement:
    """E_v identified with <u_{S_v}>."""
    return rescale(table, table.simple_class(v))


def v_power(table: ClassTable, e: int) -> QSqrtScalar:
    return QSqrtScalar.v_power(e, table.q)


def multiply(x: HallElement, y: HallElement) -> HallElement:
    if x.table.quiver != y.table.quiver or x.table.q != y.table.q:
        raise ValueError("elements live in different Hall algebras")
    table = x.table
    out = {}
    for a, ca in x.coeffs.items():
        da = table.class_dim(a)
        for b, cb in y.coeffs.items():
            db = table.class_dim(b)
            twist = v_power(table, -euler_bilinear(table.quiver, db, da))
            coeff = ca * cb * twist
            for lam in table.classes_of_dim(dim_add(da, db)):
                g = table.hall_number(lam, a, b)
                if g:
                    s = out.get(lam, QSqrtScalar.zero(table.q)) + coeff * g
                    if s.is_zero():
                        out.pop(lam, None)
                    else:
                        out[lam] = s
    return HallElement(table, out)


def power(x: HallElement, n: int) -> HallElement:
    out = identity_element(x.table)
    for _ in range(n):
        out = multiply(out, x)
    return out


def divided_power(table: ClassTable, cls: IsoClass, t: int) -> HallElement:
    """<u_cls>^(t) = <u_cls>^t / [t]!_{eps}; equals <u_{t*cls}> and both sides
    are computed and compared."""
    if t < 0:
        raise ValueError("negative divided power")
    if not table.is_exceptional(cls):
        raise ValueError(f"{cls.label} is not exceptional")
    if t == 0:
        return identity_element(table)
    eps = table.epsilon(cls)
    fact = eval_at_sqrt_q(quantum_factorial(t, eps), table.q)
    lhs = power(rescale(table, cls), t).scale(fact.inverse())
    tcls = IsoClass(tuple(sorted(cls.parts * t)))
    rhs = rescale(table, tcls)
    assert lhs == rhs, f"divided-power identity failed for {cls.label}^({t})"
    return rhs


def derivation(kind: str, alpha: IsoClass, x: HallElement) -> HallElement:
    """The operators r_a, r'_a, delta_right (= delta_a), delta_left (= _a delta).

    r_a  <u_l> = sum_b v^{<b,a>+(a,b)} g^l_{b a} (a_b a_a / a_l) <u_b>
    r'_a <u_l> = sum_b v^{<a,b>+(a,b)} g^l_{a b} (a_b a_a / a_l) <u_b>
    _a delta = v^{2(-dim a + eps a)} / a_a * r'_a,  delta_a likewise with r_a.
    """
    if kind not in ("r", "rprime", "delta_right", "delta_left"):
        raise ValueError(f"unknown derivation kind {kind!r}")
    table = x.table
    q = table.q
    da = table.class_dim(alpha)
    a_a = table.aut_order(alpha)
    out = {}
    for lam, cl in x.coeffs.items():
        dl = table.class_dim(lam)
        db = dim_sub(dl, da)
        if any(d < 0 for d in db):
            continue
        a_l = table.aut_order(lam)
        for beta in table.classes_of_dim(db):
            if kind in ("r", "delta_right"):
                g = table.hall_number(lam, beta, alpha)
                exp = euler_bilinear(table.quiver, table.class_dim(beta), da)
            else:
                g = table.hall_number(lam, alpha, beta)
                exp = euler_bilinear(table.quiver, da, table.class_dim(beta))
            if not g:
                continue
            exp += euler_symmetric(table.quiver, da, table.class_dim(beta))
            a_b = table.aut_order(beta)
            coeff = v_power(table, exp) * Fraction(g * a_b * a_a, a_l)
            s = out.get(beta, QSqrtScalar.zero(q)) + cl * coeff
            if s.is_zero():
                out.pop(beta, None)
            else:
                out[beta] = s
    res = HallElement(table, out)
    if kind in ("delta_right", "delta_left"):
        pref = v_power(table, 2 * (-sum(da) + table.epsilon(alpha))) * Fraction(1, a_a)
        res = res.scale(pref)
    return res


def rprime(alpha: IsoClass, x: HallElement) -> HallElement:
    return derivation("rprime", alpha, x)


def ringel_pair(x: HallElement, y: HallElement) -> QSqrtScalar:
    """(<u_b>, <u_b'>)_R = v^{(b,b)} a_b^{-1} delta_{b b'}, extended bilinearly."""
    if x.table.quiver != y.table.quiver or x.table.q != y.table.q:
        raise ValueError("elements live in different Hall algebras")
    table = x.table
    total = QSqrtScalar.zero(table.q)
    for cls, cx in x.coeffs.items():
        cy = y.coeffs.get(cls)
        if cy is None:
            continue
        d = table.class_dim(cls)
        norm = v_power(table, euler_symmetric(table.quiver, d, d)) / table.aut_order(cls)
        total = total + cx * cy * norm
    return total


def transport_Ti(x: HallElement, i: int, target_table: ClassTable | None = None) -> HallElement:
    """T_i along sigma^+_i at a sink: relabel each basis class by its image.

    Rejects support containing the simple V_i (the extended Drinfeld-double
    formula is out of scope).
    """
    table = x.table
    if not table.quiver.is_sink(i):
        raise ValueError(f"vertex {table.quiver.vertices[i]!r} is not a sink")
    si = f"S{table.quiver.vertices[i]}"
    if target_table is None:
        target_table = ClassTable(table.quiver.reflect(i), table.q, table.dim_bound,
                                  table.point_budget, table.ext_budget)
    out = {}
    for cls, c in x.coeffs.items():
        if si in cls.parts:
            raise ValueError(f"class {cls.label} has a V_{si} summand")
        image = reflect_plus(table.representative(cls), i)
        new_cls = target_table.label_module(image)
        out[new_cls] = QSqrtScalar(c.rational_part, c.root_part, table.q)
    return HallElement(target_table, out)


def serre_defect(table: ClassTable, i: int, j: int) -> HallElement:
    """The quantum Serre sum for E_i, E_j; zero iff the relation holds."""
    from .scalars import quantum_binomial
    datum_aij = _cartan_aij(table, i, j)
    eps_i = 1
    n = 1 - datum_aij
    ei, ej = chevalley(table, i), chevalley(table, j)
    total = zero_element(table)
    for t in range(n + 1):
        coeff = eval_at_sqrt_q(quantum_binomial(n, t, eps_i), table.q)
        if t % 2:
            coeff = coeff * (-1)
        term = multiply(power(ei, t), multiply(ej, power(ei, n - t)))
        total = total + term.scale(coeff)
    return total


def _cartan_aij(table: ClassTable, i: int, j: int) -> int:
    from .quivers import cartan_datum
    return cartan_datum(table.quiver).a_ij(i, j)
