import os
import sys

sys.path.insert(0, os.path.abspath(".."))

project = "python-platslide"
copyright = "2026, platslide developers"
author = "platslide developers"

version = "0.1"
release = "0.1"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
]

templates_path = ["_templates"]

source_suffix = [".rst"]

master_doc = "index"

exclude_patterns = ["build"]

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = "sphinx"


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]

# Output file base name for HTML help builder.
htmlhelp_basename = "PlatslidePythonAPI"

description = "Plat-slide words of Heegaard diagrams"

# (source start file, target name, title,
#  author, documentclass [howto, manual, or own class]).
latex_documents = [
    (
        master_doc,
        "PlatslidePythonAPI.tex",
        description,
        author,
        "manual",
    ),
]

# (source start file, name, description, authors, manual section).
man_pages = [(master_doc, "platslide", description, [author], 1)]

intersphinx_mapping = {
    "python3": ("https://docs.python.org/3/", None),
    "networkx": ("https://networkx.org/documentation/stable/", None),
    "sympy": ("https://docs.sympy.org/latest/", None),
}
