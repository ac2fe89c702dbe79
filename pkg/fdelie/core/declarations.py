# fdelie/core/declarations.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : expression core | names known to the DSL

from dataclasses import dataclass, field, replace

from ..config import FREE_INDICES
from ..errors import InvalidFixtureError


@dataclass(frozen=True)
class KernelSpec:
    """Declared two-point kernel.

    With a diagonal value d the kernel is carried as d*dirac(x,x') plus an
    off-diagonal part named <name>off; off_diagonal=False drops that part.
    """
    name: str
    parity: str = "none"
    diagonal: str | None = None
    off_diagonal: bool = True

    @property
    def off_name(self):
        return f"{self.name}off" if self.diagonal is not None else self.name


@dataclass(frozen=True)
class FunctionalSpec:
    name: str
    depends: tuple = ("Phi", "t", "u")
    anchors: int = 0
    on_solution: bool = False


DEFAULT_KERNELS = (
    KernelSpec("C", "antisymmetric", "(2*a1*t + a2)/2"),
    KernelSpec("c"),
)

DEFAULT_FUNCTIONALS = (
    FunctionalSpec("eta"),
    FunctionalSpec("xit"),
    FunctionalSpec("xi", anchors=1),
    FunctionalSpec("f2", ("t", "u")),
    FunctionalSpec("g", ("u",)),
    FunctionalSpec("h", ("t", "u")),
)


@dataclass(frozen=True)
class Declarations:
    params: tuple = ("a1", "a2", "a3", "a4", "a5", "a6")
    index_functions: tuple = ("a4", "a5")
    kernels: tuple = DEFAULT_KERNELS
    functionals: tuple = DEFAULT_FUNCTIONALS
    times: tuple = ("t",)
    fields: tuple = ("u",)
    free_indices: tuple = field(default=FREE_INDICES)

    def kernel(self, name):
        """Return (spec, is_off_part) for a kernel name, or None."""
        for spec in self.kernels:
            if spec.name == name:
                return spec, False
            if spec.diagonal is not None and spec.off_name == name:
                return spec, True
        return None

    def functional(self, name):
        for spec in self.functionals:
            if spec.name == name:
                return spec
        return None

    def field_component(self, name):
        if name in self.fields:
            return self.fields.index(name) + 1
        return None

    def on_solution_names(self):
        return tuple(spec.name for spec in self.functionals if spec.on_solution)

    def with_kernels(self, *specs):
        names = {s.name for s in specs}
        kept = tuple(k for k in self.kernels if k.name not in names)
        return replace(self, kernels=kept + tuple(specs))

    def with_functionals(self, *specs):
        names = {s.name for s in specs}
        kept = tuple(f for f in self.functionals if f.name not in names)
        return replace(self, functionals=kept + tuple(specs))

    def with_free_indices(self, *names):
        extra = tuple(n for n in names if n not in self.free_indices)
        return replace(self, free_indices=self.free_indices + extra)

    @classmethod
    def from_mapping(cls, data, source="<mapping>", base=None):
        """Build declarations from the optional blocks of a problem/generator file."""
        decl = base or cls()
        try:
            kernels = [KernelSpec(k["name"], k.get("parity", "none"), k.get("diagonal"),
                                  bool(k.get("off_diagonal", True)))
                       for k in data.get("kernels", [])]
            functionals = [FunctionalSpec(f["name"], tuple(f.get("depends", ("Phi", "t", "u"))),
                                          int(f.get("anchors", 0)), bool(f.get("on_solution", False)))
                           for f in data.get("functionals", [])]
        except (KeyError, TypeError) as exc:
            raise InvalidFixtureError(source, f"bad declaration block ({exc})") from exc
        if kernels:
            decl = decl.with_kernels(*kernels)
        if functionals:
            decl = decl.with_functionals(*functionals)
        if "params" in data:
            decl = replace(decl, params=decl.params + tuple(p for p in data["params"] if p not in decl.params))
        if "times" in data:
            times = tuple(data["times"])
            decl = replace(decl, times=times)
            decl = decl.with_functionals(*[FunctionalSpec(f"xi{t}") for t in times])
        if "free_indices" in data:
            decl = decl.with_free_indices(*data["free_indices"])
        return decl
