import sys

from .evaluator import serve

if __name__ == "__main__":
    sys.exit(serve())
