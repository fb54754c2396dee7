#!/usr/bin/env python3
# Resolving free-text prompts against the object-type ontology.
#
# Prompts follow the template "<object> in <site> <modality>", with the
# site and modality both optional. The resolver normalizes case, hyphens
# and stray punctuation, splits on the last " in ", strips filler words
# like "image" or "scan", and looks the pieces up in the ontology.

from bioparse import candidates_for, load_default_ontology, resolve_prompt

ont = load_default_ontology()
cats, metas, objs = ont.counts()
print("ontology: %d categories, %d meta-types, %d object types" %
      (cats, metas, objs))
print("sites: %d, modalities: %s" % (len(ont.sites), ", ".join(ont.modalities)))

prompts = [
    "enhancing tumor in brain MRI",
    "glandular structure in colon pathology image",
    "left heart ventricle",
    "LV",
    "polyp in colon",
    "hepatic vessel in CT",
    "  Melanoma in Skin Dermoscopy image! ",
]
print("\nresolutions:")
for p in prompts:
    r = resolve_prompt(p, ont)
    print("  %-45s -> %s | site=%s | modality=%s"
          % (repr(p), r.object_type, r.site, r.modality))

# Every object type belongs to a meta-type and a category:
obj = ont.object_type("enhancing tumor")
print("\n'enhancing tumor' sits under meta-type %r in category %r"
      % (obj.meta_type, obj.category))
print("its synonyms:", ", ".join(obj.synonyms))

# Given a site and modality, which object types are plausible prompts?
c = candidates_for(ont, "mri", "brain")
print("\n%d candidate types for brain MRI, e.g.:" % len(c))
for name in c[:6]:
    print("  -", name)

# Unknown sites are rejected rather than guessed:
try:
    resolve_prompt("polyp in wonderland", ont)
except Exception as e:
    print("\n'polyp in wonderland' ->", e)
