# src/dualchart/__main__.py

from dualchart.cli import app

if __name__ == "__main__":
    app()
