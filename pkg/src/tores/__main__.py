from tores.frontend.cli import entry

entry()
