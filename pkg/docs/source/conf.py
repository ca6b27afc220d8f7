# Configuration file for the Sphinx documentation builder.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
from datetime import date

sys.path.insert(0, os.path.abspath("../.."))


# -- Project information -----------------------------------------------------

project = "reachadp"
copyright = "%s, reachadp developers" % date.today().year
author = "reachadp developers"
release = "0.0"


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx_panels",
    "numpydoc",
]

numpydoc_show_class_members = False

# Autodoc Settings
add_module_names = False
autoclass_content = "both"

exclude_patterns = []


# -- Options for HTML output -------------------------------------------------

html_theme = "pydata_sphinx_theme"

# Prevent panels extension from modifying page style.
panels_add_bootstrap_css = False
