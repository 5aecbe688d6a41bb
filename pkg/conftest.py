import os
import sys

# módulos do projeto são importados a partir da raiz
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
