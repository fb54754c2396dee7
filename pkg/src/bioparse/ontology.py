"""Three-layer object ontology and templatic prompt resolution.

The ontology is shipped as data: three root categories (histology, organ,
abnormality), a middle layer of meta-types, and a fine-grained layer of
object types carrying synonym surfaces plus the anatomic sites and
imaging modalities they occur under.

Prompts follow the template "[OBJECT TYPE] in [ANATOMIC SITE] [MODALITY]".
Resolution is deterministic: normalize, split the template on the last
" in ", look the object phrase up in the synonym table, then peel the
modality off the end of the tail. There is no fuzzy matching; a phrase
outside the synonym table is a vocabulary error, which is unrelated to
the statistical invalidity handled by the validity module.

A catch-all object type named "other" exists for dataset labeling only;
prompt resolution never returns it and it is indexed under no modality.
"""

import json
import string
from dataclasses import dataclass
from importlib import resources

from .errors import FormatError, ResolutionError

CATEGORY_NAMES = frozenset({"histology", "organ", "abnormality"})
OTHER_TYPE = "other"

# trailing noise words ignored while matching the modality at the tail of
# a prompt, so "colon pathology image" reads as site colon + pathology
_FILLER_TOKENS = frozenset({"image", "images", "scan", "scans", "slide", "slides",
                            "photograph", "photographs", "picture", "pictures"})

_STRIP_CHARS = string.punctuation + string.whitespace


def normalize(text) -> str:
    """Lowercase, fold hyphens to spaces, trim punctuation, collapse runs."""
    s = str(text).lower().replace("-", " ")
    s = s.strip(_STRIP_CHARS)
    return " ".join(s.split())


@dataclass(frozen=True)
class ObjectType:
    name: str
    meta_type: str
    category: str
    synonyms: tuple
    sites: tuple
    modalities: tuple
    provisional: bool = False


@dataclass(frozen=True)
class PromptResolution:
    object_type: str
    site: str | None
    modality: str | None
    matched_surface: str


class Ontology:
    """Validated, immutable view of an ontology document."""

    def __init__(self, categories, meta_types, object_types):
        self.categories = tuple(categories)
        self.meta_types = tuple(meta_types)  # (name, category) pairs
        self.object_types = tuple(object_types)
        self.sites = tuple(sorted({s for o in object_types for s in o.sites}))
        self.modalities = tuple(
            sorted({m for o in object_types for m in o.modalities})
        )
        self._by_name = {o.name: o for o in object_types}
        self._surfaces = {}
        for o in object_types:
            if o.name == OTHER_TYPE:
                continue  # dataset label only, never resolvable
            for surface in (o.name, *o.synonyms):
                key = normalize(surface)
                other = self._surfaces.get(key)
                if other is not None and other != o.name:
                    raise FormatError(
                        f"synonym {surface!r} of {o.name!r} already names {other!r}"
                    )
                self._surfaces[key] = o.name
        self._site_set = set(self.sites)
        self._modality_set = set(self.modalities)
        self.site_modality_index = {}
        for o in object_types:
            for m in o.modalities:
                for s in o.sites:
                    self.site_modality_index.setdefault((m, s), []).append(o.name)

    def object_type(self, name: str) -> ObjectType:
        try:
            return self._by_name[name]
        except KeyError:
            raise ResolutionError(f"unknown object type {name!r}") from None

    def is_object_type(self, name: str) -> bool:
        return name in self._by_name

    @property
    def synonyms(self) -> dict:
        return dict(self._surfaces)

    def counts(self):
        return len(self.categories), len(self.meta_types), len(self.object_types)


def _require(doc, key, node):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"ontology node {node!r} is missing field {key!r}")
    return doc[key]


def _name_list(values, node, field):
    if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
        raise FormatError(f"ontology node {node!r} field {field!r} must be a list of strings")
    return tuple(values)


def load_ontology(document) -> Ontology:
    """Parse and validate an ontology document (dict or JSON text)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise FormatError(f"ontology is not valid JSON: {e}") from None
    cats = _require(document, "categories", "<root>")
    if not isinstance(cats, list):
        raise FormatError("ontology field 'categories' must be a list")
    categories, meta_types, object_types = [], [], []
    for cat in cats:
        cat_name = _require(cat, "name", "<category>")
        categories.append(cat_name)
        for meta in _require(cat, "meta_types", cat_name):
            meta_name = _require(meta, "name", f"{cat_name}/<meta>")
            meta_types.append((meta_name, cat_name))
            for obj in _require(meta, "object_types", meta_name):
                obj_name = _require(obj, "name", f"{meta_name}/<object>")
                object_types.append(ObjectType(
                    name=obj_name,
                    meta_type=meta_name,
                    category=cat_name,
                    synonyms=_name_list(
                        _require(obj, "synonyms", obj_name), obj_name, "synonyms"),
                    sites=_name_list(
                        _require(obj, "sites", obj_name), obj_name, "sites"),
                    modalities=_name_list(
                        _require(obj, "modalities", obj_name), obj_name, "modalities"),
                    provisional=bool(obj.get("provisional", False)),
                ))
    if set(categories) != CATEGORY_NAMES or len(categories) != 3:
        raise FormatError(
            f"ontology categories must be exactly {sorted(CATEGORY_NAMES)}, got {categories}"
        )
    if len({m for m, _ in meta_types}) != len(meta_types):
        raise FormatError("ontology meta-type names must be unique")
    names = [o.name for o in object_types]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise FormatError(f"ontology object-type names must be unique: {dup}")
    return Ontology(categories, meta_types, object_types)


def dump_ontology(ontology: Ontology) -> str:
    """Serialize back to the canonical on-disk form (load-stable)."""
    doc = {"categories": []}
    for cat in ontology.categories:
        metas = []
        for meta_name, cat_name in ontology.meta_types:
            if cat_name != cat:
                continue
            objs = []
            for o in ontology.object_types:
                if o.meta_type != meta_name:
                    continue
                entry = {
                    "name": o.name,
                    "synonyms": list(o.synonyms),
                    "sites": list(o.sites),
                    "modalities": list(o.modalities),
                }
                if o.provisional:
                    entry["provisional"] = True
                objs.append(entry)
            metas.append({"name": meta_name, "object_types": objs})
        doc["categories"].append({"name": cat, "meta_types": metas})
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_default_ontology() -> Ontology:
    """Load the reference ontology shipped with the package."""
    text = resources.files("bioparse").joinpath("data/ontology.json").read_text("utf-8")
    return load_ontology(text)


def resolve_prompt(text, ontology: Ontology) -> PromptResolution:
    """Resolve a templatic prompt into (object type, site, modality).

    The template splits on the last " in "; with no " in " the whole
    prompt is the object phrase. The modality is matched against the
    longest suffix of the tail after dropping filler words; whatever
    precedes it is the anatomic site.
    """
    norm = normalize(text)
    if not norm:
        raise ResolutionError("empty prompt")
    if " in " in norm:
        phrase, tail = norm.rsplit(" in ", 1)
    else:
        phrase, tail = norm, ""
    obj = ontology.synonyms.get(phrase)
    if obj is None:
        raise ResolutionError(f"unknown object type {phrase!r}")
    site = modality = None
    if tail:
        tokens = tail.split()
        while tokens and tokens[-1] in _FILLER_TOKENS:
            tokens.pop()
        rest = tokens
        for k in range(len(tokens), 0, -1):
            suffix = " ".join(tokens[-k:])
            if suffix in ontology._modality_set:
                modality = suffix
                rest = tokens[:-k]
                break
        if rest:
            site_name = " ".join(rest)
            if site_name not in ontology._site_set:
                raise ResolutionError(f"unknown anatomic site {site_name!r}")
            site = site_name
    return PromptResolution(obj, site, modality, phrase)


def candidates_for(ontology: Ontology, modality, site=None):
    """Object types indexed under a modality, optionally narrowed to a site.

    With no site, the union over every site of that modality is returned
    in ontology declaration order.
    """
    m = normalize(modality)
    if m not in ontology._modality_set:
        raise ResolutionError(f"unknown modality {modality!r}")
    if site is not None and normalize(site) != "":
        s = normalize(site)
        if s not in ontology._site_set:
            raise ResolutionError(f"unknown anatomic site {site!r}")
        return list(ontology.site_modality_index.get((m, s), []))
    hits = []
    for o in ontology.object_types:
        if m in o.modalities and o.name not in hits:
            hits.append(o.name)
    return hits
