# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

from pathlib import Path

# -- Path setup --------------------------------------------------------------

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here. If the directory is relative to the
# documentation root, use os.path.abspath to make it absolute, like shown here.
curpath = Path(__file__).parent.resolve(strict=True)

# -- Project information -----------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#project-information

project = 'plangraph'
copyright = '2026, plangraph Developers'
author = 'plangraph Developers'

# -- General configuration ---------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#general-configuration

extensions = ["numpydoc",
              "sphinx.ext.autodoc",
              "sphinx.ext.intersphinx",
              "sphinx.ext.todo",
              "sphinxemoji.sphinxemoji",
              "sphinxcontrib.towncrier.ext",
              ]

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store', "changes/devel"]



# -- Options for HTML output -------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#options-for-html-output

html_theme = 'pydata_sphinx_theme'
html_static_path = ['_static']

html_css_files = [
    'css/custom.css',
]

html_title = "plangraph 🗺️"

# -- Intersphinx configuration -----------------------------------------------

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "networkx": ("https://networkx.org/documentation/stable", None),
    "pandas": ("https://pandas.pydata.org/pandas-docs/stable", None),
}



# NumPyDoc configuration -----------------------------------------------------

numpydoc_class_members_toctree = False

numpydoc_show_inherited_class_members = False

numpydoc_attributes_as_param_list = True
numpydoc_xref_param_type = True

numpydoc_validate = True

numpydoc_xref_aliases = {
    # Python
    "file-like": ":term:`file-like <python:file object>`",
    "iterator": ":term:`iterator <python:iterator>`",
    "path-like": ":term:`path-like`",
    "array-like": ":term:`array_like <numpy:array_like>`",
    "Path": ":class:`python:pathlib.Path`",
    "bool": ":ref:`bool <python:typebool>`",
    # NetworkX
    "DiGraph": "networkx.DiGraph",
    # Pandas
    "DataFrame": "pandas.DataFrame",
    # plangraph
    "TaskGraph": ":class:`~plangraph.core.TaskGraph`",
    "Rule": ":class:`~plangraph.core.Rule`",
    "Plan": ":class:`~plangraph.core.Plan`",
    "SubPlan": ":class:`~plangraph.core.SubPlan`",
    "ScheduleResult": ":class:`~plangraph.core.ScheduleResult`",
    "GenConfig": ":class:`~plangraph.graphgen.GenConfig`",
    "DatasetRow": ":class:`~plangraph.graphgen.DatasetRow`",
    "DatasetSpec": ":class:`~plangraph.graphgen.DatasetSpec`",
    "Solution": ":class:`~plangraph.solver.Solution`",
    "EftTable": ":class:`~plangraph.solver.EftTable`",
    "PlanVerdict": ":class:`~plangraph.evaluator.PlanVerdict`",
    "CaseRecord": ":class:`~plangraph.metrics.CaseRecord`",
    "RunReport": ":class:`~plangraph.metrics.RunReport`",
    "ReportTable": ":class:`~plangraph.metrics.ReportTable`",
    "LabeledInstance": ":class:`~plangraph.dataset.LabeledInstance`",
    "PromptTemplate": ":class:`~plangraph.harness.PromptTemplate`",
    "ModelEndpointConfig": ":class:`~plangraph.harness.ModelEndpointConfig`",
    "QueryResult": ":class:`~plangraph.harness.QueryResult`",
    "RunResult": ":class:`~plangraph.harness.RunResult`",
}

numpydoc_xref_ignore = {"of", "A",}

# -- sphinxcontrib-towncrier configuration -----------------------------------

towncrier_draft_working_directory = str(curpath.parent)
