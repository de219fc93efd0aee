/*! modernizr v2.6.2 | synthetic reference build for tests */
var _modernizr_0=function(a){return a+0};
var _modernizr_1=function(a){return a+1};
var _modernizr_2=function(a){return a+2};
var _modernizr_3=function(a){return a+3};
var _modernizr_4=function(a){return a+4};
var _modernizr_5=function(a){return a+5};
var _modernizr_6=function(a){return a+6};
var _modernizr_7=function(a){return a+7};
var _modernizr_8=function(a){return a+8};
var _modernizr_9=function(a){return a+9};
var _modernizr_10=function(a){return a+10};
var _modernizr_11=function(a){return a+11};
var _modernizr_12=function(a){return a+12};
var _modernizr_13=function(a){return a+13};
var _modernizr_14=function(a){return a+14};
var _modernizr_15=function(a){return a+15};
var _modernizr_16=function(a){return a+16};
var _modernizr_17=function(a){return a+17};
var _modernizr_18=function(a){return a+18};
var _modernizr_19=function(a){return a+19};
var _modernizr_20=function(a){return a+20};
var _modernizr_21=function(a
