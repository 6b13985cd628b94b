from ptmetric.cli import main

raise SystemExit(main())
