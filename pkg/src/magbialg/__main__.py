import sys

from magbialg.cli import main

sys.exit(main())
