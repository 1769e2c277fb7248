#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# atrc-lab documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os
from datetime import datetime

sys.path.insert(0, os.path.abspath('..'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'numpydoc',
]

numpydoc_show_class_members = False

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

version = '1.0'
release = '1.0.0'
project = u"atrc-lab ({0})".format(release)
year = datetime.now().year
author = 'atrc-lab developers'
copyright = u"{0} {1}".format(year, author)

language = 'en'
exclude_patterns = ['_build']
pygments_style = 'sphinx'
todo_include_todos = False

html_theme = 'alabaster'
html_theme_options = {
    "description": "Exact and Monte Carlo checks for the Ashkin-Teller random-cluster model",
}
html_sidebars = {
                '**': ['about.html', 'navigation.html', 'relations.html', 'searchbox.html']
                }
htmlhelp_basename = 'atrclabdoc'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'networkx': ('https://networkx.org/documentation/stable/', None),
}
