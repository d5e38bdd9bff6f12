"""Exact ground fields: the rationals and prime fields F_p.

All scalar arithmetic in the engine goes through a Field object.  Rational
scalars are `fractions.Fraction` (always lowest terms, positive denominator);
F_p scalars are plain ints in range(p).  Nothing here is ever a float.
"""

from fractions import Fraction


class FieldError(ValueError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Field:
    """A field tag plus its scalar arithmetic.

    ``char == 0`` means the rationals, otherwise the prime field F_char.
    """

    def __init__(self, char=0):
        if char != 0 and not _is_prime(char):
            raise FieldError("field characteristic must be 0 or a prime, got %r" % (char,))
        self.char = char

    # -- constructors -------------------------------------------------

    @property
    def zero(self):
        return Fraction(0) if self.char == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.char == 0 else 1

    def of(self, x):
        """Coerce an int, Fraction, or coefficient string into this field."""
        if isinstance(x, str):
            x = x.strip()
            if "/" in x:
                num, den = x.split("/")
                x = Fraction(int(num), int(den))
            else:
                x = int(x)
        if self.char == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.char == 0:
                raise FieldError("denominator %d not invertible mod %d" % (x.denominator, self.char))
            return (x.numerator * pow(x.denominator, -1, self.char)) % self.char
        return int(x) % self.char

    # -- arithmetic ---------------------------------------------------

    def add(self, a, b):
        return a + b if self.char == 0 else (a + b) % self.char

    def sub(self, a, b):
        return a - b if self.char == 0 else (a - b) % self.char

    def mul(self, a, b):
        return a * b if self.char == 0 else (a * b) % self.char

    def neg(self, a):
        return -a if self.char == 0 else (-a) % self.char

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero in %s" % self)
        return 1 / Fraction(a) if self.char == 0 else pow(a, -1, self.char)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    # -- serialization ------------------------------------------------

    def to_str(self, a):
        """Exact text form; round-trips through ``of`` losslessly."""
        if self.char == 0 and a.denominator != 1:
            return "%d/%d" % (a.numerator, a.denominator)
        return str(int(a))

    def tag(self):
        return "Q" if self.char == 0 else "Fp:%d" % self.char

    @classmethod
    def from_tag(cls, tag):
        tag = tag.strip()
        if tag in ("Q", "QQ", "0"):
            return cls(0)
        if tag.startswith("Fp:"):
            return cls(int(tag[3:]))
        if tag.startswith("F"):
            return cls(int(tag[1:]))
        raise FieldError("unknown field tag %r" % tag)

    def __eq__(self, other):
        return isinstance(other, Field) and other.char == self.char

    def __hash__(self):
        return hash(("Field", self.char))

    def __repr__(self):
        return "Field(%s)" % self.tag()


QQ = Field(0)


def GF(p):
    return Field(p)
