import sys

from rdfh.cli import main

sys.exit(main())
