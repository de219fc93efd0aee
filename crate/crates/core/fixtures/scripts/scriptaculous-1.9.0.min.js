/*! scriptaculous v1.9.0 | synthetic reference build for tests */
var _scriptaculous_0=function(a){return a+0};
var _scriptaculous_1=function(a){return a+1};
var _scriptaculous_2=function(a){return a+2};
var _scriptaculous_3=function(a){return a+3};
var _scriptaculous_4=function(a){return a+4};
var _scriptaculous_5=function(a){return a+5};
var _scriptaculous_6=function(a){return a+6};
var _scriptaculous_7=function(a){return a+7};
var _scriptaculous_8=function(a){return a+8};
var _scriptaculous_9=function(a){return a+9};
var _scriptaculous_10=function(a){return a+10};
var _scriptaculous_11=function(a){return a+11};
var _scriptaculous_12=function(a){return a+12};
var _scriptaculous_13=function(a){return a+13};
var _scriptaculous_14=function(a){return a+14};
var _scriptaculous_15=function(a){return a+15};
var _scriptaculous_16=function(a){return a+16};
var _scriptaculous_17=function(a){return a+17};
var _scriptaculous_18=function(a){return a+18};
var _scriptaculous_19=function(a){ret
