"""The ``torsor-problem v1`` text format: an INI body behind a version header."""

import configparser

from .coeffs import CoeffScalar, check_prime
from .errors import InputError
from .hopf import L, R, GroupEmbedding, HopfAlgebra, builtin, regular_embedding
from .poly import MultiPoly, as_poly, parse, parse_scalar
from .schemes import AffineAlgebra, Section, flat_closure, generic_fiber
from .torsors import TorsorPresentation, additive_embedding

HEADER = "torsor-problem v1"


def _split(value):
    return [s.strip() for s in value.split(",") if s.strip()]


class Document:
    """Parsed problem: problem options plus named scheme, group and torsor blocks."""

    def __init__(self, text, source="<input>"):
        self.source = source
        lines = text.splitlines()
        while lines and (not lines[0].strip() or lines[0].lstrip().startswith("#")):
            lines.pop(0)
        if not lines or lines[0].strip() != HEADER:
            raise InputError(f"{source}: line 1: expected header '{HEADER}'")
        cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                       inline_comment_prefixes=None, interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string("\n".join(lines[1:]), source)
        except configparser.Error as exc:
            raise InputError(f"{source}: {exc}") from None
        self.cp = cp
        if not cp.has_section("problem"):
            raise InputError(f"{source}: missing [problem] section")
        prob = cp["problem"]
        self.p = int(self.get("problem", "p"))
        check_prime(self.p)
        self.command = prob.get("command", "")
        self.target = prob.get("target", "")
        self.options = dict(prob)
        self.blocks = {}
        for name in cp.sections():
            if name == "problem" or name in ("result", "trace"):
                continue
            parts = name.split(None, 1)
            if len(parts) != 2 or parts[0] not in ("scheme", "group", "torsor"):
                raise InputError(f"{source}: unknown section [{name}]")
            kind, label = parts
            if label in self.blocks:
                raise InputError(f"{source}: duplicate block name {label!r}")
            self.blocks[label] = (kind, name)
        self._cache = {}

    # raw access with locations
    def get(self, section, key, default=None):
        sec = self.cp[section]
        if key not in sec:
            if default is not None:
                return default
            raise InputError(f"{self.source}: [{section}] missing key '{key}'")
        return sec[key]

    def where(self, section, key):
        return f"{self.source}: [{section}] {key}"

    def poly(self, section, key, text, variables):
        try:
            return parse(text, variables, self.p)
        except InputError as exc:
            raise type(exc)(f"{self.where(section, key)}: {exc}") from None

    def scalar(self, section, key, text):
        try:
            return parse_scalar(text, self.p)
        except InputError as exc:
            raise type(exc)(f"{self.where(section, key)}: {exc}") from None

    def assignments(self, section, key, variables):
        out = {}
        for item in _split(self.get(section, key)):
            if "=" not in item:
                raise InputError(f"{self.where(section, key)}: expected name=value, got {item!r}")
            k, v = (s.strip() for s in item.split("=", 1))
            if k not in variables:
                raise InputError(f"{self.where(section, key)}: unknown variable {k!r}")
            out[k] = v
        return out

    def block(self, label, kind=None):
        if label not in self.blocks:
            raise InputError(f"{self.source}: reference to undefined block {label!r}")
        k, section = self.blocks[label]
        if kind and k != kind:
            raise InputError(f"{self.source}: block {label!r} is a {k}, expected a {kind}")
        if label not in self._cache:
            builder = {"scheme": self._scheme, "group": self._group, "torsor": self._torsor}[k]
            self._cache[label] = builder(section)
        return self._cache[label]

    def kind(self, label):
        if label not in self.blocks:
            raise InputError(f"{self.source}: reference to undefined block {label!r}")
        return self.blocks[label][0]

    # builders
    def _scheme(self, section):
        sec = self.cp[section]
        base = sec.get("base", "R")
        variables = _split(self.get(section, "variables"))
        rels = [self.poly(section, "relations", r, variables) for r in _split(sec.get("relations", ""))]
        A = AffineAlgebra(base, tuple(variables), tuple(rels), self.p)
        if base == "R" and sec.get("flat", "false") == "true":
            A = A.replace(flat=True)
        return A

    def scheme_section(self, label, key="section"):
        A = self.block(label, "scheme")
        _, section = self.blocks[label]
        if key not in self.cp[section]:
            return Section(A, {v: 0 for v in A.variables})
        vals = self.assignments(section, key, A.variables)
        return Section(A, {v: self.scalar(section, key, vals.get(v, "0")) for v in A.variables})

    def _group(self, section):
        sec = self.cp[section]
        if "builtin" in sec:
            params = {}
            for k in ("alpha", "d"):
                if k in sec:
                    params[k] = int(sec[k])
            return builtin(sec["builtin"], self.p, base=sec.get("base", "K"), var=sec.get("var", "x"), **params)
        base = sec.get("base", "K")
        variables = _split(self.get(section, "variables"))
        rels = [self.poly(section, "relations", r, variables) for r in _split(sec.get("relations", ""))]
        A = AffineAlgebra(base, tuple(variables), tuple(rels), self.p, (), sec.get("flat", "false") == "true")
        tens = [v + L for v in variables] + [v + R for v in variables]
        comult, counit, anti = {}, {}, {}
        for v in variables:
            comult[v] = self.poly(section, f"comult.{v}", self.get(section, f"comult.{v}"), tens)
            counit[v] = self.scalar(section, f"counit.{v}", self.get(section, f"counit.{v}"))
            anti[v] = self.poly(section, f"antipode.{v}", self.get(section, f"antipode.{v}"), variables)
        return HopfAlgebra(A, comult, counit, anti, section.split(None, 1)[1])

    def _torsor(self, section):
        sec = self.cp[section]
        X = self.block(self.get(section, "base"), "scheme")
        G = self.block(self.get(section, "group"), "group")
        over = sec.get("over", X.base)
        base = generic_fiber(X) if over == "K" and X.base == "R" else X
        fibre = _split(self.get(section, "fibre"))
        variables = list(base.variables) + fibre
        rels = [self.poly(section, "relations", r, variables) for r in _split(self.get(section, "relations"))]
        total = AffineAlgebra(over, tuple(variables), tuple(base.relations) + tuple(rels), self.p)
        if over == "R":
            total = flat_closure(total) if sec.get("flat", "false") != "true" else total.replace(flat=True)
        tens = [g + L for g in G.variables] + [v + R for v in variables]
        coaction = {v: self.poly(section, f"coaction.{v}", self.get(section, f"coaction.{v}"), tens)
                    for v in fibre}
        point = None
        if "point" in sec:
            vals = self.assignments(section, "point", variables)
            point = {v: self.scalar(section, "point", vals.get(v, "0")) for v in variables}
        emb, timgs = self._embedding(section, G, fibre, point)
        return TorsorPresentation(base, G, total, coaction, point, emb, timgs)

    def _embedding(self, section, G, fibre, point):
        sec = self.cp[section]
        text = sec.get("embedding", "").strip()
        if not text:
            return None, None
        p = self.p
        if text == "explicit":
            names = [k.split(".", 1)[1] for k in sec if k.startswith("embedding.")]
            d = int(round(len(names) ** 0.5)) if names else 0
            if d * d + 1 != len(names):
                raise InputError(f"{self.where(section, 'embedding')}: need d*d entries plus a determinant")
            dets = [n for n in names if n.startswith("D")]
            if len(dets) != 1:
                raise InputError(f"{self.where(section, 'embedding')}: exactly one determinant entry expected")
            prefix = dets[0][1:]
            gimg = {n: self.poly(section, f"embedding.{n}", sec[f"embedding.{n}"], G.variables) for n in names}
            tv = self._total_vars(section)
            timg = {n: self.poly(section, f"image.{n}", self.get(section, f"image.{n}"), tv) for n in names}
            return GroupEmbedding(d, gimg, prefix, dets[0]), timg
        if len(fibre) != 1 or len(G.variables) != 1:
            raise InputError(f"{self.where(section, 'embedding')}: additive embeddings need one fibre variable")
        (g,) = G.variables
        (fv,) = fibre
        shift = point[fv] if point else 0
        if text.startswith("additive"):
            scale = text.split(":", 1)[1].strip() if ":" in text else "1"
            return additive_embedding(G, self.scalar(section, "embedding", scale), fv, shift)
        if text.startswith("basis:"):
            basis = [self.poly(section, "embedding", b, [g]) for b in _split(text.split(":", 1)[1])]
            emb = regular_embedding(G, basis)
            t = MultiPoly.var(fv, p) - as_poly(shift, p)
            return emb, {k: as_poly(f, p).substitute({g: t}) for k, f in emb.images.items()}
        raise InputError(f"{self.where(section, 'embedding')}: unknown embedding {text!r}")

    def _total_vars(self, section):
        X = self.block(self.get(section, "base"), "scheme")
        return list(X.variables) + _split(self.get(section, "fibre"))

    def torsor_section(self, label, key):
        T = self.block(label, "torsor")
        _, section = self.blocks[label]
        sec = self.cp[section]
        if key not in sec:
            return {}
        vals = self.assignments(section, key, T.total.variables)
        return {v: self.poly(section, key, s, list(T.base.variables)) for v, s in vals.items()}

    def names(self, label):
        _, section = self.blocks[label]
        out = {}
        for item in _split(self.cp[section].get("names", "")):
            if "->" not in item:
                raise InputError(f"{self.where(section, 'names')}: expected old->new, got {item!r}")
            a, b = (s.strip() for s in item.split("->", 1))
            out[a] = b
        return out


# -- writing ----------------------------------------------------------------------

def _rels(A):
    return ", ".join(str(r) for r in A.all_relations())


def scheme_block(name, A):
    out = [f"[scheme {name}]", f"base = {A.base}", f"variables = {', '.join(A.variables)}",
           f"relations = {_rels(A)}"]
    if A.flat:
        out.append("flat = true")
    return out


def group_block(name, G):
    A = G.algebra
    out = [f"[group {name}]", f"base = {A.base}", f"variables = {', '.join(A.variables)}",
           f"relations = {_rels(A)}"]
    if A.flat:
        out.append("flat = true")
    for v in A.variables:
        out.append(f"comult.{v} = {as_poly(G.comult[v], A.p)}")
        c = G.counit[v]
        out.append(f"counit.{v} = {c if isinstance(c, CoeffScalar) else CoeffScalar.from_int(c, A.p)}")
        out.append(f"antipode.{v} = {as_poly(G.antipode[v], A.p)}")
    return out


def torsor_block(name, T, base_name, group_name):
    over = T.total.base
    out = [f"[torsor {name}]", f"base = {base_name}", f"group = {group_name}", f"over = {over}",
           f"fibre = {', '.join(T.fibre_variables)}", f"relations = {_rels(T.total)}"]
    if over == "R" and T.total.flat:
        out.append("flat = true")
    for v in T.fibre_variables:
        out.append(f"coaction.{v} = {T.coaction[v]}")
    if T.embedding is not None and T.total_images is not None:
        out.append("embedding = explicit")
        emb = T.embedding
        for k in emb.entry_names() + [emb.det_name]:
            out.append(f"embedding.{k} = {as_poly(emb.images[k], T.p)}")
        for k in emb.entry_names() + [emb.det_name]:
            out.append(f"image.{k} = {as_poly(T.total_images[k], T.p)}")
    return out


def write_document(p, command, target, blocks, extra=None):
    out = [HEADER, "[problem]", f"p = {p}", f"command = {command}", f"target = {target}"]
    for b in blocks:
        out.append("")
        out.extend(b)
    for title, items in (extra or {}).items():
        out.append("")
        out.append(f"[{title}]")
        for k, v in items:
            out.append(f"{k} = {v}")
    return "\n".join(out) + "\n"
